from .device import TargetDevice, device_input
from .extractor import ProfiledExtractor, ExtractionResult, profile, \
	extract_logits, self_test, save_bundle, load_bundle
from .oracle import LogitOracle, ExactLogitOracle, logit_oracle
