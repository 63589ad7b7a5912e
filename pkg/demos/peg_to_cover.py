"""Fill a peg permutation, turn it into a rule, and build a cover from pegs."""

from gridcover import ConvexVectorSet, PegPermutation, counting_sequence, fill, peg_cover_to_struct_cover, peg_to_rule
from gridcover.perms import Basis
from gridcover.rules import render_rule

peg = PegPermutation.parse("3o1-4o2+")
print(peg, "filled by <1,3,1,2>:", fill(peg, (1, 3, 1, 2)))
print(render_rule(peg_to_rule(peg)))

# Av(132,213,231,312) is the increasing and decreasing permutations
pegs = [
    (PegPermutation.parse("1+"), ConvexVectorSet.parse("1..")),
    (PegPermutation.parse("1-"), ConvexVectorSet.parse("2..")),
]
cover = peg_cover_to_struct_cover(pegs, Basis.parse("132_213_231_312"))
print(len(cover), "rules, verified to length", cover.depth_verified)
print(counting_sequence(cover, 10).comma_line())
