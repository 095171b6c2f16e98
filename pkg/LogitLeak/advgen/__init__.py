from .objectives import cw_logit_objective, zoo_log_objective, \
	distortion_l2
from .zoo import AttackSpec, ZooState, AttackReport, CountingObjective, \
	fd_gradient_coord, zoo_attack
from .bim import bim_whitebox_baseline
from .report_io import save_report, load_report, export_adversarial_idx
