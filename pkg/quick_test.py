"""Quick test script to verify the simulator works on the sprinkler instance"""
import os
import tempfile

os.environ.setdefault('QWMC_SEED', '12345')

print("=" * 70)
print("LOADING SPRINKLER INSTANCE...")
print("=" * 70)

from app.logic.formula import exact_solve
from app.logic.instances import SPRINKLER_MAP_QUERY, sprinkler

wf = sprinkler()
solution = exact_solve(wf, SPRINKLER_MAP_QUERY)
print(f"\n✅ n={wf.num_vars}, clauses={wf.formula.num_clauses}")
print(f"📄 Exact WMC: {solution.wmc:.4f}, models: {solution.model_count}")

print("=" * 70)
print("TESTING QUANTUM PROCEDURES...")
print("=" * 70)

from app.algorithms.counting import qwmc
from app.algorithms.sampling import vote_map, vote_mpe
from app.rng import make_rng

# Test 1: QWMC with five counting bits
print("\n📝 Test 1: QWMC (t=5, 1000 shots)")
try:
    estimate = qwmc(wf, t=5, shots=1000, rng=make_rng(1))
    ok = estimate.measured_phase_integer in (6, 26)
    print(f"\n{'✅' if ok else '❌'} Mode y={estimate.measured_phase_integer}, "
          f"WMC estimate {estimate.normalized_estimate:.4f} (exact {solution.normalized_wmc:.4f})")
    print(f"📄 Oracle queries: {estimate.oracle_queries}")
except Exception as e:
    print(f"\n❌ Error: {e}")
    import traceback
    traceback.print_exc()

# Test 2: MPE and MAP by repeat-and-vote
print("\n" + "=" * 70)
print("\n📝 Test 2: MPE / MAP votes (8000 shots)")
try:
    mpe = vote_mpe(wf, 8000, make_rng(2), t=5)
    map_vote = vote_map(wf, SPRINKLER_MAP_QUERY, 8000, make_rng(3), t=5)
    print(f"\n{'✅' if mpe.bits == '101' else '❌'} MPE: {mpe.bits}")
    print(f"{'✅' if map_vote.bits == '01' else '❌'} MAP over X1,X3: {map_vote.bits}")
except Exception as e:
    print(f"\n❌ Error: {e}")
    import traceback
    traceback.print_exc()

# Test 3: Full reproduction run into a scratch directory
print("\n" + "=" * 70)
print("\n📝 Test 3: repro-sprinkler")
try:
    from app.commands import cmd_repro_sprinkler
    from app.schemas import RunConfig

    with tempfile.TemporaryDirectory() as out_dir:
        report = cmd_repro_sprinkler(RunConfig(command="repro-sprinkler", out_dir=out_dir, shots=4000))
        print(f"\n✅ Wrote {', '.join(report.files)}")
        print(f"📄 Queries: {report.oracle_queries}")
except Exception as e:
    print(f"\n❌ Error: {e}")
    import traceback
    traceback.print_exc()

print("\n" + "=" * 70)
print("✅ TESTING COMPLETE!")
print("=" * 70)
