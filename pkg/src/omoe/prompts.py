"""Per-domain answer-format prompts and the matching response parser."""

from __future__ import annotations

import re
from typing import Optional, Sequence

import numpy as np

_HEADER = """### Instructions:
1. Read the question carefully and identify what is being asked.
2. Solve the problem methodically, showing each step clearly.
3. Double-check your calculations before finalizing the answer.
4. Your final output MUST follow EXACTLY this format:

### Reasoning:
[Your step-by-step reasoning here]

"""

# wording (typos included) is kept verbatim: models were evaluated on these exact bytes
TEMPLATES = {
    "gsm8k": _HEADER + """### Final Answer: [Numerical Value]

### Required Output Format Rules:
- Only numbers allowed in final answer (e.g., 42, 3.14, 2/3)
- If uncertain, return ### Final Answer: 0
- No additional text after final answer
- Final answer must be the last line

### Question:
{question}

### Choices:
{choices}

### Reasoning:
""",
    "commonsenseqa": _HEADER + """### Final Answer: One of 5 catagories [A, B, C, D, E]

### Required Output Format Rules:
- Only numbers are allowed in the final answer (e.g., A, B, C, D, E)
- If you cannot determine the answer, you MUST pick a random answer from [A, B, C, D, E].
- No additional text, explanations, or characters after the final answer.
- The final answer line must be the very last line of your response.

### Question:
{question}

### Choices:
{choices}

### Reasoning:
""",
    "boolq": _HEADER + """### Final Answer: One of 2 catagories [true, false]

### Required Output Format Rules:
- Only numbers are allowed in the final answer (e.g., true, false)
- If you cannot determine the answer, you MUST pick a random answer from [true, false].
- No additional text, explanations, or characters after the final answer.
- The final answer line must be the very last line of your response.

### Question:
{question}

### Reasoning:
""",
}

CATEGORIES = {
    "commonsenseqa": ("A", "B", "C", "D", "E"),
    "boolq": ("true", "false"),
}

# fractions first: with the decimal branch first "2/3" would parse as "2"
NUMERIC_ANSWER = re.compile(r"Final Answer:\s*([-+]?\d+/\d+|-?\d+\.?\d*)", re.IGNORECASE)
TOKEN_ANSWER = re.compile(r"Final Answer:\s*\[?\s*([A-Za-z]+)", re.IGNORECASE)
NUMERIC_FALLBACK = "0"


def render_prompt(domain: str, question: str, choices: Optional[Sequence[str]] = None) -> str:
    if domain not in TEMPLATES:
        raise ValueError(f"unknown domain {domain!r}; expected one of {sorted(TEMPLATES)}")
    text = TEMPLATES[domain]
    if isinstance(choices, str):
        rendered = choices
    else:
        rendered = "\n".join(choices or ())
    # plain replacement: questions may contain braces
    return text.replace("{question}", question).replace("{choices}", rendered)


def parse_response(text: str, domain: str = "gsm8k", catalogue: Optional[Sequence[str]] = None,
                   rng: Optional[np.random.Generator] = None) -> str:
    """Last final-answer value in ``text``.

    Numeric domains fall back to ``"0"``.  Categorical domains return the
    catalogue item named on the last final-answer line, or a uniformly random
    item when there is none.
    """
    if domain == "gsm8k" or (domain not in CATEGORIES and catalogue is None):
        hits = NUMERIC_ANSWER.findall(text or "")
        return hits[-1] if hits else NUMERIC_FALLBACK
    items = tuple(catalogue) if catalogue is not None else CATEGORIES[domain]
    lookup = {item.lower(): item for item in items}
    for token in reversed(TOKEN_ANSWER.findall(text or "")):
        if token.lower() in lookup:
            return lookup[token.lower()]
    rng = rng if rng is not None else np.random.default_rng()
    return items[int(rng.integers(len(items)))]
