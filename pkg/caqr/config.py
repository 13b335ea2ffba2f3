"""
Configuration constants for the qubit-reuse transpiler
"""

import os
import pathlib

# Calibration defaults (dt units, 1 dt = 0.22 ns)
DT_NS = 0.22
SQ_DURATION_DT = 160
CX_DURATION_DT = 3500
MEASURE_DURATION_DT = 0  # terminal readout does not extend the schedule
MR_DURATION_DT = 16467  # measure + classically controlled X
BUILTIN_RESET_DURATION_DT = 33179  # measure + built-in reset
CX_ERROR = 0.01
SQ_ERROR = 0.0
READOUT_ERROR = 0.02

# Architectures
BUILTIN_ARCHITECTURES = {
    'heavy-hex-27': 27,
    'heavy-hex-65': 65,
    'heavy-hex-127': 127,
}

# Mapper
LOOKAHEAD_ALPHA = 1.0
LOOKAHEAD_LAYERS = 2
SWAP_PATH_LIMIT = 64  # shortest paths examined per routed gate

# Scheduler / coloring limits
EXACT_COLORING_MAX_VERTICES = 16
EXACT_LAYOUT_MAX_VERTICES = 12
LAYOUT_RESTARTS = 16  # seeded greedy tie-breaks tried above the exact size
MATCHING_GREEDY_ABOVE = 1000  # frontier vertices
COMMUTING_CANDIDATE_POOL = 4
EXACT_SCORING_EDGE_LIMIT = 150  # commuting gates

# Simulator
MAX_SIM_WIRES = 14
EQUIVALENCE_TOLERANCE = 1e-9
PROB_DIGITS = 12  # exact probabilities are rounded to this many decimals

# Generators
DEFAULT_SEED = 0
DEFAULT_GAMMA = 0.7
DEFAULT_BETA = 0.4

# Service
SERVER_HOST = '0.0.0.0'
SERVER_PORT = int(os.environ.get('CAQR_PORT', '3000'))

# Logging
LOG_LEVEL = os.environ.get('CAQR_LOG', 'WARNING').upper()
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# Report styling
CHART_FONT = 'Arial'
CHART_FONT_SIZE = 12
TITLE_FONT_SIZE = 16
CHART_HEIGHT = 420
CHART_MARGIN = dict(l=40, r=40, t=80, b=40)
CHART_COLORS = {
    'depth': '#3498db',
    'duration': '#e74c3c',
    'swaps': '#27ae60',
    'grid': '#34495e',
    'text': '#2c3e50',
}

# File paths
BASE_DIR = pathlib.Path(__file__).parent
DEFAULT_OUT_DIR = pathlib.Path.cwd()
