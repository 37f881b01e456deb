"""
Tokens and noise schedules
==========================

Labels become fixed-length token rows, and a schedule says how much of a row
survives after t corruption steps.
"""

import numpy as np

from diffstr import Charset, Vocabulary, build_schedule, decode_tokens, encode_label

vocab = Vocabulary(Charset.named("alnum36"))
print("K =", vocab.K, "  EOS/PAD/MASK ids:", vocab.eos, vocab.pad, vocab.mask)

# A label of 4 characters in a row of 9: characters, one EOS, then padding.
row = encode_label("cat7", vocab, 9)
print(row, "->", " ".join(vocab.token_str(int(i)) for i in row))
print("decoded back:", decode_tokens(row, vocab))

# The linear-mask schedule removes an equal share of the survivors at each step,
# so alpha_bar falls on a straight line.
lin = build_schedule("linear-mask", 10)
cos = build_schedule("cosine", 10)
np.set_printoptions(precision=3, suppress=True)
print("linear-mask alpha_bar:", np.asarray(lin.alpha_bars))
print("cosine      alpha_bar:", np.asarray(cos.alpha_bars))

# Both end at exactly zero, so the reverse chain starts from an all-MASK row.
assert lin.alpha_bars[-1] == 0.0 and cos.alpha_bars[-1] == 0.0
