"""Mini-batch training with plateau learning-rate reduction and early stopping."""

import math
from collections.abc import Sequence

import numpy as np

from src.errors import TooFewSubjects
from src.harness.dataset import Sample, stack_batch
from src.micronet.base import Network, build_network
from src.micronet.ops import cross_entropy
from src.micronet.optim import AdamState, adam_step
from src.models.network import NetworkSpec
from src.models.training import EpochRecord, TrainingCurve, TrainPolicy
from src.utils.logging import ExperimentLogger


class PlateauScheduler:
    """
    Reduce the learning rate when validation loss stops improving.

    After ``f`` firings the rate is exactly ``lr * multiplier ** f``.
    """

    def __init__(self, policy: TrainPolicy):
        self.base_lr = policy.lr
        self.multiplier = policy.lr_multiplier
        self.patience = policy.sched_patience
        self.min_delta = policy.min_delta
        self.best = math.inf
        self.bad_epochs = 0
        self.firings = 0

    @property
    def lr(self) -> float:
        return self.base_lr * self.multiplier**self.firings

    def step(self, val_loss: float) -> bool:
        """Record one epoch; True when the rate was reduced."""
        if val_loss < self.best - self.min_delta:
            self.best = val_loss
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        if self.bad_epochs >= self.patience:
            self.firings += 1
            self.bad_epochs = 0
            return True
        return False


class EarlyStopping:
    """Track the best validation loss and stop after ``patience`` epochs without it."""

    def __init__(self, patience: int, min_delta: float):
        self.patience = patience
        self.min_delta = min_delta
        self.best = math.inf
        self.best_epoch = 0
        self.bad_epochs = 0

    def step(self, val_loss: float, epoch: int) -> bool:
        """True when ``val_loss`` is a new best."""
        if val_loss < self.best - self.min_delta:
            self.best = val_loss
            self.best_epoch = epoch
            self.bad_epochs = 0
            return True
        self.bad_epochs += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.bad_epochs >= self.patience


def batch_loss(network: Network, samples: Sequence[Sample], batch_size: int) -> tuple[float, float]:
    """Mean cross-entropy and accuracy (fraction) over ``samples``."""
    total, correct = 0.0, 0
    for start in range(0, len(samples), batch_size):
        chunk = samples[start : start + batch_size]
        batch, labels = stack_batch(chunk)
        logits, _ = network.forward(batch)
        loss, _ = cross_entropy(logits, labels)
        total += loss * len(chunk)
        correct += int(np.sum(np.argmax(logits, axis=1) == labels))
    return total / len(samples), correct / len(samples)


def train_model(
    spec: NetworkSpec,
    train: Sequence[Sample],
    val: Sequence[Sample],
    policy: TrainPolicy,
    seed: int,
    run_logger: ExperimentLogger | None = None,
    fold: int = 0,
) -> tuple[Network, TrainingCurve]:
    """
    Train a fresh network and restore the epoch with the best validation loss.

    Args:
        spec: Network architecture and initialisation seed
        train, val: Samples for fitting and model selection
        policy: Optimizer, scheduler and stopping settings
        seed: Mini-batch shuffling seed
        run_logger: Receives per-epoch and scheduler events
        fold: Fold index for log context

    Returns:
        (network holding the best parameters, training curve)
    """
    if not train or not val:
        raise TooFewSubjects(
            f"fold {fold}: training needs non-empty train and validation sets "
            f"(got {len(train)} / {len(val)})"
        )

    network = build_network(spec)
    rng = np.random.default_rng(seed)
    state = AdamState()
    scheduler = PlateauScheduler(policy)
    stopper = EarlyStopping(policy.stop_patience, policy.min_delta)
    curve = TrainingCurve()
    best_params = network.copy_params()

    for epoch in range(1, policy.max_epochs + 1):
        lr = scheduler.lr
        order = rng.permutation(len(train))
        running = 0.0
        for start in range(0, len(train), policy.batch_size):
            chunk = [train[i] for i in order[start : start + policy.batch_size]]
            batch, labels = stack_batch(chunk)
            loss, grads = network.loss_and_grads(batch, labels)
            adam_step(network.params, grads, state, lr, policy.beta1, policy.beta2, policy.eps)
            running += loss * len(chunk)
        train_loss = running / len(train)

        val_loss, val_accuracy = batch_loss(network, val, policy.batch_size)
        improved = stopper.step(val_loss, epoch)
        if improved:
            best_params = network.copy_params()
        curve.epochs.append(
            EpochRecord(
                epoch=epoch,
                train_loss=train_loss,
                val_loss=val_loss,
                val_accuracy=100.0 * val_accuracy,
                lr=lr,
                improved=improved,
            )
        )
        if run_logger is not None:
            run_logger.log_epoch(fold, epoch, train_loss, val_loss, lr, improved=improved)

        if scheduler.step(val_loss) and run_logger is not None:
            run_logger.log_scheduler(fold, epoch, lr, scheduler.lr)
        if stopper.should_stop:
            curve.stopped_early = True
            break

    curve.best_epoch = stopper.best_epoch
    curve.scheduler_firings = scheduler.firings
    network.load_params(best_params)
    return network, curve
