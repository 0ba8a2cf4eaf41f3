from .cucb import BaselineState, CucbLearner, committee_arms, cucb_round
from .regret import RegretTrace, WeightedPlay, digest, play_value, realized_correct, regret_step
from .see import SeeLearner, SeeState, removal_test, see_round, see_step
from .targeted import TargetedLearner, targeted_m_schedule
from .wmv import WmvLearner, WmvState, optimistic_competencies, wmv_round
from .zooming import ZoomingLearner, zoom_radius, zooming_arms, zooming_round

__all__ = [
    "BaselineState", "CucbLearner", "committee_arms", "cucb_round",
    "RegretTrace", "WeightedPlay", "digest", "play_value", "realized_correct", "regret_step",
    "SeeLearner", "SeeState", "removal_test", "see_round", "see_step",
    "TargetedLearner", "targeted_m_schedule",
    "WmvLearner", "WmvState", "optimistic_competencies", "wmv_round",
    "ZoomingLearner", "zoom_radius", "zooming_arms", "zooming_round",
]
