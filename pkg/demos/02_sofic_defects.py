"""Measure how well labeled graphs approximate a group.

A word over the generator symbols acts by composing permutations (rightmost
letter first).  Words that hold in the target group should fix almost every
vertex, words that do not should fix almost none; the defect is the fraction
of vertices on the wrong side.
"""

from soficlab import cayley_graph
from soficlab.sofic import Word, defect, random_permutation_model, reduced_words, sofic_report
from soficlab import groups

# Cayley graphs act exactly: every relation of the group has defect 0
c6 = cayley_graph(groups.cyclic_table(6), [1, 5])
print("a^6 = 1 in Z6:", defect(c6, Word(("g1",) * 6, expects_identity=True)))
print("a free?      :", defect(c6, Word(("g1",), expects_identity=False)))

# C4 pretending to approximate the integers: a^4 fixes everything although
# a^4 is not the identity in Z, so the defect of the *false* relation is 1
c4 = cayley_graph(groups.cyclic_table(4), [1, 3])
print("a^4 on C4 viewed over Z:", defect(c4, Word(("g1",) * 4, expects_identity=False)))

# random 2-permutation model: a sofic approximation of the free group F2
g = random_permutation_model(10_000, pairs=2, seed=20240817)
words = reduced_words(g.gens, max_len=4, expects_identity=False)
report = sofic_report(g, words)
print(f"\nrandom model on {g.n} vertices, {len(words)} reduced words up to length 4")
print("max defect:", report.max_defect)
worst = max(report.defects, key=lambda pair: pair[1])
print("worst word:", " ".join(worst[0].letters), "defect", worst[1])
