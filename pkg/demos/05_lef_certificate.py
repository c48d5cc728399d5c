"""Extract a finite multiplicative certificate from a product approximation.

The graph approximates S4 x Z5 with labels split into a gamma part (the S4
generators) and the rest.  Words over the Z5 labels act as almost
automorphisms of the gamma-labeled subgraph; clustering them yields a finite
group into which the word set embeds multiplicatively, which is exactly the
finite-certificate content of local embeddability into finite groups.
"""

from soficlab import cayley_graph
from soficlab.almost_auto import ImprovementConfig
from soficlab.clusters import lef_certificate
from soficlab.sofic import Word
from soficlab import groups

table, gen_idx = groups.preset_group("s4xz5")
g = cayley_graph(table, gen_idx)
print("graph:", g)

gamma = ["g30", "g45", "g90"]  # the embedded S4 generators
f_words = [Word((), True), Word(("g1",), True), Word(("g1", "g1"), True)]
print("word set F = {0, 1, 2} inside Z5, as powers of the translation g1")

cert = lef_certificate(g, gamma, f_words, delta=0.0, cfg=ImprovementConfig())
print("\nstatus:", cert.status)
print("image group order:", cert.group_order, "element orders:", cert.element_orders)
for witness in cert.witnesses:
    word = " ".join(witness["word"]) or "()"
    print(f"  word {word:<12} -> cluster {witness['cluster']}")
print("table:")
print(cert.table)
