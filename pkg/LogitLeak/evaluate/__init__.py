from .metrics import Curve, MetricsBundle, save_metrics, load_metrics
from .evaluate_extraction import evaluate_extraction, attack_logits, \
	PositionAttack, compare_scorers
from .evaluate_attacks import summarize_attacks, attack_metrics, \
	check_trace_accounting
