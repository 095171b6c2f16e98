from .errors import LogitLeakError, ConfigError, DataError, ShapeError, \
	AttackError, EmptyPoiError, TrainingDivergedError, ConvergenceError, \
	RejectedInputError
from .adam import Adam, CoordinateAdam
from .losses import get_loss, get_loss_fn
from .seeds import derive_rng, derive_seed
from .convert import array2dict, dict2array, dump_document, load_document, \
	document_hash, hdf2txt
from .config import DEFAULT_CONFIG, SEED_STAGES, SCORERS, merge_dicts, \
	load_config, validate_config, seed_overrides
