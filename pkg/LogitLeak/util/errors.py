class LogitLeakError(Exception):
    exit_code = 1


class ConfigError(LogitLeakError):
    exit_code = 2


class DataError(LogitLeakError):
    exit_code = 3


class ShapeError(LogitLeakError, ValueError):
    exit_code = 3


class AttackError(LogitLeakError):
    exit_code = 4


class EmptyPoiError(AttackError):
    """No sample reaches the SNR threshold.

    Carries the maximum observed SNR so the caller can lower the threshold.
    """

    def __init__(self, threshold, max_snr, position=None):
        self.threshold = threshold
        self.max_snr = max_snr
        self.position = position
        where = "" if position is None else " for logit position %d" % position
        super(EmptyPoiError, self).__init__(
            "no sample with SNR >= %g%s (max SNR %g)"
            % (threshold, where, max_snr))


class TrainingDivergedError(AttackError):
    def __init__(self, lr, epoch, batch):
        self.lr = lr
        self.epoch = epoch
        self.batch = batch
        super(TrainingDivergedError, self).__init__(
            "loss became NaN (lr=%g, epoch=%d, batch=%d)" % (lr, epoch, batch))


class ConvergenceError(AttackError):
    def __init__(self, accuracy, required):
        self.accuracy = accuracy
        self.required = required
        super(ConvergenceError, self).__init__(
            "victim training did not converge: held-out accuracy %.4f < %.4f"
            % (accuracy, required))


class RejectedInputError(AttackError):
    pass
