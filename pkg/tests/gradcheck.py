"""Central finite-difference gradient checking for network layers.

Layers are instantiated in float64 so the comparison is not polluted by
float32 cancellation. The check perturbs every element of every
parameter (and of the input) by +/- h and compares the numeric slope of
a fixed linear readout against the analytic backward pass.
"""

import numpy as np

REL_TOL = 1e-3
H = 1e-3
DROPOUT_RNG_SEED = 12345


def _away_from_zero(rng, shape, margin=0.2):
    """Random values with |x| >= margin, so ReLU-style kinks stay clear of
    the finite-difference step."""
    x = rng.normal(size=shape)
    return x + margin * np.sign(x)


def check_layer(layer, x, training=True, rel_tol=REL_TOL, h=H, check_input=True):
    """Assert every analytic gradient matches central differences.

    The loss is sum(forward(x) * g) for a fixed random g; dropout layers
    regenerate the same mask on every forward because the rng is reseeded
    per call.
    """
    rng = np.random.default_rng(0xC0FFEE)

    def run_forward():
        return layer.forward(x, training=training, rng=np.random.default_rng(DROPOUT_RNG_SEED))

    out = run_forward()
    g = rng.normal(size=out.shape)

    def loss():
        return float((run_forward() * g).sum())

    out = run_forward()
    dx = layer.backward(g)
    analytic_grads = [(p.value, p.grad.copy()) for p in layer.params()]
    if check_input:
        analytic_grads.append((x, dx))

    worst = 0.0
    for array, grad in analytic_grads:
        flat = array.reshape(-1)
        grad_flat = np.asarray(grad).reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            loss_plus = loss()
            flat[i] = orig - h
            loss_minus = loss()
            flat[i] = orig
            numeric = (loss_plus - loss_minus) / (2.0 * h)
            rel = abs(numeric - grad_flat[i]) / (abs(grad_flat[i]) + 1e-8)
            worst = max(worst, rel)
            assert rel < rel_tol, (
                f"{type(layer).__name__}: element {i} analytic {grad_flat[i]:.6g} "
                f"vs numeric {numeric:.6g} (rel {rel:.3g})"
            )
    return worst
