"""
Recovering a chain with MRNET
=============================

Pairwise index values feed a max-relevance min-redundancy network. On a
Markov chain the direct links should outrank the indirect ones.
"""

# %%
# Five variables linked in a chain X1 - X2 - X3 - X4 - X5.

import numpy as np

from cimstat.network import NullRegistry, aupr_top_k, monotonicity_census, mrnet, pairwise_matrix
from cimstat.synth import gen_markov_chain

data = gen_markov_chain(5, 400, link_tau=0.7, seed=4)
mat = pairwise_matrix(data, nulls=NullRegistry(replicates=200, seed=0))
np.set_printoptions(precision=3, suppress=True)
print(mat.values)

# %%
# Dependence weakens along the chain, so removing redundancy leaves the
# direct edges at the top.

net = mrnet(mat)
for i, j, score in net.top(6):
    print(f"{data.labels[i]} - {data.labels[j]}: {score:.3f}")
truth = [(0, 1), (1, 2), (2, 3), (3, 4)]
print("AUPR over top 10:", round(aupr_top_k(net, truth, k=10), 3))

# %%
# The chain is Gaussian, so every strong dependence is monotone.

print(monotonicity_census(mat).to_dict())
