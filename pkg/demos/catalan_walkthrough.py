"""Walk Av(231) through every stage: blocks, rules, cover, counts, equation, samples."""

from gridcover import (
    RunConfig,
    block_set,
    conjecture,
    counting_sequence,
    functional_equations,
    generate_rules,
    render_rule,
    sample_uniform,
)
from gridcover.perms import Basis

basis = Basis.parse("231")

blocks = block_set(basis)
print("blocks:", ", ".join(b.name() for b in blocks))

rules = generate_rules(basis)
print(f"{len(rules)} candidate rules up to 4x4")

res = conjecture(RunConfig("231"))
print(res.status, "-", res.message)
for r in res.cover.rules:
    print(render_rule(r))

print(functional_equations(res.cover).render())
print(counting_sequence(res.cover, 12).comma_line())

for p in sample_uniform(res.cover, 12, seed=7, count=3):
    print("sample:", p)
