# config.py - Central configuration file

APP_NAME = 'evonav'
APP_VERSION = '1.0.0'

# Environment
SEED_ENV_VAR = 'EVONAV_SEED'
DEFAULT_SEED = 0

# Arena Settings (meters)
ARENA_WIDTH = 1.0
ARENA_HEIGHT = 1.0

# Robot Settings (Khepera-scale)
BODY_RADIUS = 0.0275
AXLE_TRACK = 0.053
MAX_WHEEL_SPEED = 0.08

# Camera Settings
CAMERA_FOV_DEG = 45.0
CAMERA_PIXELS = 16
CAMERA_MAX_RANGE = 1.0

# Network Settings
NETWORK_HIDDEN = 8
NETWORK_OUTPUTS = 2
WEIGHT_LIMIT = 4.0

# Trial Settings
TRIAL_STEPS = 400
TRIAL_DT = 0.1
STARTS_PER_TRIAL = 2
START_POSE_ATTEMPTS = 10_000
START_CLEARANCE_RADII = 4.0   # starts lie outside the wall-proximity band of the fitness

# Kinematics / Fitness
STRAIGHT_LINE_OMEGA = 1e-9
PROXIMITY_RADII = 4.0

# Evolution Settings
POPULATION_SIZE = 60
GENERATIONS = 100
ELITE_COUNT = 1
PARENT_COUNT = 15
CROSSOVER_PROB = 0.1
MUTATION_PROB = 0.05
MUTATION_STD = 0.3
INIT_RANGE = 1.0

# Sweep Settings
REPLICATES = 5
FULL_FOVS = tuple(float(fov) for fov in range(0, 181, 2))
DESK_FOVS = (5.0, 15.0, 45.0, 90.0, 135.0, 180.0)

# Analysis Settings
STABILIZATION_TOL = 0.05
GOOD_FITNESS = 0.85
STABILIZED_BY_GENERATION = 30

# Presets (applied over the config file, under explicit flags)
PRESETS = {
    'desk': {
        'sweep': {'fov_values': list(DESK_FOVS), 'replicates': 3},
        'evolution': {'population_size': 30, 'generations': 30},
    },
    'paper': {
        'sweep': {'fov_values': list(FULL_FOVS), 'replicates': 5},
        'evolution': {'population_size': 60, 'generations': 100},
    },
    'paper30': {
        'sweep': {'fov_values': list(FULL_FOVS), 'replicates': 5},
        'evolution': {'population_size': 60, 'generations': 30},
    },
}

# Output Files
HISTORY_FILE = 'history.csv'
SUMMARY_FILE = 'summary.csv'
THRESHOLDS_FILE = 'thresholds.csv'
HEATMAP_BEST_FILE = 'heatmap_best.csv'
HEATMAP_AVG_FILE = 'heatmap_avg.csv'
ANALYSIS_FILE = 'analysis.json'
BEST_GENOME_FILE = 'best_genome.json'
TRAJECTORY_FILE = 'trajectory.csv'
MANIFEST_FILE = 'manifest.json'
DEFAULT_OUT_DIR = 'results'

# CSV Schemas
HISTORY_COLUMNS = ['fov_deg', 'replicate', 'generation', 'best_fitness', 'mean_fitness']
SUMMARY_COLUMNS = [
    'fov_deg',
    'final_best_mean',
    'final_avg_mean',
    'stabilization_gen_best',
    'stabilization_gen_avg'
]
THRESHOLD_COLUMNS = ['fov_deg', 'threshold', 'first_gen_best', 'first_gen_avg']
TRAJECTORY_COLUMNS = ['step', 'x', 'y', 'heading', 'v_left', 'v_right', 'phi', 'collision']
SIGNIFICANT_DIGITS = 9

# Logging
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Exit Codes
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
