from ._sgicl import (
    SgiclError,
    assign_classes,
    cosine,
    render_generation_prompt,
    render_inference_prompt,
    run_cli,
    sample_worth,
    task_names,
    validate_templates,
)

__all__ = [
    "SgiclError",
    "assign_classes",
    "cosine",
    "render_generation_prompt",
    "render_inference_prompt",
    "run_cli",
    "sample_worth",
    "task_names",
    "validate_templates",
]
