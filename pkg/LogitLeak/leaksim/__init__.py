from .config import LeakageConfig, LEAK_MODELS, hamming_weight, \
	signal_variance, calibrate_sigma
from .traces import Trace, TraceSet
from .simulate import simulate_trace, simulate_traces, clean_traces
from .capture import capture_profiling_set, capture_attack_set, \
	UNIFORM, MODEL_DRIVEN
from .io_llts import read_llts, write_llts
