"""Quick end-to-end check of the bindings at q = 8 and q = 16."""

import pyovalherd as oh

f = oh.Field(8)
assert f.q == 8 and f.e == 3
assert f.mul(f.inv(5), 5) == 1
assert f.trace(f.trace_one_smallest()) == 1

# x^6 is an o-polynomial at q = 8; its table round-trips through interpolation
x6 = [0, 0, 0, 0, 0, 1, 0]
table = oh.tabulate(f, x6)
assert oh.is_o_permutation(f, table)
assert oh.interpolate_table(f, table) == x6
assert not oh.is_o_permutation(f, oh.tabulate(f, [0, 0, 1, 0, 0, 0, 0]))

hyperovals = oh.census(f)
assert len(hyperovals) == 1
classes = oh.oval_classes(f, hyperovals)
assert sorted(c[2] for c in classes) == [168, 1512]

for clan in (oh.Clan.classical(f), oh.Clan.subiaco(f)):
    assert len(clan) == 8 and clan.is_qclan() and clan.is_flock()
    herd = clan.herd()
    assert herd.is_herd() and len(herd.members()) == 9

a, b = oh.Clan.classical(f).herd(), oh.Clan.subiaco(f).herd()
assert a.isomorphic(a) is not None
assert a.isomorphic(b) is None
tables = [oh.tabulate(f, c[3]) for c in classes]
assert {m[1] for m in b.fingerprint(tables)} == {0}

g = oh.Field(16)
assert oh.Clan.adelaide(g).is_qclan()
assert oh.Clan.classical(oh.Field(4)).gq_check()
assert oh.t2_check(oh.Field(4))

try:
    oh.Field(12)
except ValueError:
    pass
else:
    raise AssertionError("q = 12 accepted")

print("smoke test passed")
