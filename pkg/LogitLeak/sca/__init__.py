from .snr import SnrProfile, PoiSelection, compute_snr, empirical_snr, \
	select_poi, class_statistics, NUM_BYTE_CLASSES
from .templates import TemplateModel, fit_templates, template_log_scores, \
	template_log_scores_batch, regularized_cholesky
from .neural import NeuralDistinguisher, train_distinguisher, \
	neural_log_scores, DEFAULT_HYPER, LOG_FLOOR
from .accumulate import UniformScorer, map_accumulate, rank_of, \
	attack_ranks, success_rate_curve, guessing_entropy_curve, \
	traces_to_disclosure
from .model_io import save_distinguisher, load_distinguisher, \
	distinguisher_to_dict, distinguisher_from_dict
