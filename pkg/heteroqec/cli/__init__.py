from .main import main, build_parser, cmd_build_code, cmd_decode_one, cmd_run, cmd_fit, cmd_plot, cmd_verify, \
    verify_oracle, verify_census, EXIT_OK, EXIT_USAGE, EXIT_RUNTIME
from .plots import PlotKind, plot, plot_layout
from .results import read_points, select, group
