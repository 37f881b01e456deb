"""
Forward corruption and the reverse posterior
============================================

Corrupt a row with the absorbing kernel, then walk it back with a denoiser that
already knows the answer.  The posterior can only reveal the true token or
leave MASK in place, so the chain lands on the clean row.
"""

import torch

from diffstr import Charset, Vocabulary, build_schedule, encode_label
from diffstr.diffusion import DenoiserOutput, corrupt, posterior_probs, sample

vocab = Vocabulary(Charset.named("alnum36"))
sched = build_schedule("linear-mask", 8)
x0 = torch.from_numpy(encode_label("demo42", vocab, 9))[None]
g = torch.Generator().manual_seed(0)


def show(x):
    return "".join(vocab.token_str(int(i)) for i in x[0])


for t in (0, 2, 4, 6, 8):
    print(f"q(x_{t} | x_0):", show(corrupt(x0, t, sched, "absorbing", vocab.K, vocab.mask, g)))

# One reverse step from a half-masked row with a uniform belief over characters.
x_t = corrupt(x0, 4, sched, "absorbing", vocab.K, vocab.mask, g)
belief = torch.full((1, 9, vocab.K), 1.0 / vocab.n_chars, dtype=torch.float64)
belief[..., vocab.n_chars:] = 0.0
belief /= belief.sum(-1, keepdim=True)
p = posterior_probs(x_t, belief, 4, sched, "absorbing", vocab.mask)
print("P(stay MASK) at masked slots:", p[0, x_t[0] == vocab.mask, vocab.mask].tolist()[:3])

# An oracle denoiser: all its mass on the true token.
logits = torch.full((1, 9, vocab.K), float("-inf"), dtype=torch.float64)
logits.scatter_(-1, x0.unsqueeze(-1), 0.0)


def oracle(x_t, z, t):
    return DenoiserOutput(logits, torch.zeros(1, 9, dtype=torch.float64))


out = sample(oracle, torch.zeros(1, 1, 1), 9, vocab.K, vocab.mask, sched, "absorbing", g,
             callback=lambda t, x: print(f"after step {t:2d}:", show(x)))
assert torch.equal(out, x0)
