"""
I/O for tapkit.

- readers: versioned JSON instances, solutions and datasets; metrics CSV
- render: deterministic SVG frames
"""

from .readers import (
    MANIFEST,
    dumps,
    instance_filename,
    instance_from_dict,
    instance_to_dict,
    read_dataset,
    read_instance,
    read_instances,
    read_manifest,
    read_metrics,
    read_solution,
    solution_from_dict,
    solution_to_dict,
    to_csv,
    write_dataset,
    write_instance,
    write_solution,
)
from .render import (
    box_color,
    box_patches,
    figure_to_svg,
    packing_figure,
    pile_figure,
    render_instance,
    render_solution,
    render_svg,
)

__all__ = [
    # JSON
    "dumps",
    "instance_to_dict",
    "instance_from_dict",
    "solution_to_dict",
    "solution_from_dict",
    "read_instance",
    "write_instance",
    "read_solution",
    "write_solution",
    # Datasets
    "MANIFEST",
    "instance_filename",
    "write_dataset",
    "read_manifest",
    "read_dataset",
    "read_instances",
    # Metrics
    "to_csv",
    "read_metrics",
    # Rendering
    "box_color",
    "box_patches",
    "figure_to_svg",
    "pile_figure",
    "packing_figure",
    "render_instance",
    "render_solution",
    "render_svg",
]
