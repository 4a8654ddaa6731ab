from .phase_diagram import (
    CSV_COLUMNS,
    PlotSpec,
    SchemaError,
    boundary_lines,
    read_sweep_csv,
    render_phase_diagram,
)

__version__ = "0.1.0"
