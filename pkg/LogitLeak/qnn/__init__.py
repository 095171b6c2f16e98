from .quantize import QuantizedTensor, quantize_ptq, dequantize, \
	choose_frac_bits, representable_range, quantize_input, normalize_pixels
from .inference import LogitVector, QuantizedLayer, QuantizedModel, \
	forward, forward_batch, classify, to_raw, from_raw
from .softmax import nnom_softmax, nnom_softmax_batch, \
	argmax_search_schedule, schedule_operands, logit_histogram, \
	ScheduleEvent, LOAD_LOGIT, LOAD_BASE, STORE_BASE
from .train import train_victim, quantize_network
from .digits import make_digits, write_digits
from .io_idx import read_idx, write_idx, read_dataset
from .shadow import FloatMLP
from .model_io import save_model, load_model, model_hash, save_shadow, \
	load_shadow
