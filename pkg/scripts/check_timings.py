# Per-check wall-time profile of the verification suite.  Useful when
# tuning sample counts: the suite should stay well under a minute.

import argparse
import time

from weiljet.harness import MUTATIONS, default_specs, run_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--filter", help="substring filter on check names")
    parser.add_argument("--mutate", choices=sorted(MUTATIONS),
                        help="run against an intentionally broken operation")
    args = parser.parse_args()

    specs = default_specs(seed=args.seed, name_filter=args.filter)
    t0 = time.perf_counter()
    reports = run_suite(specs, mutation=args.mutate)
    total = time.perf_counter() - t0

    for report in sorted(reports, key=lambda r: r.elapsed, reverse=True):
        flag = "ok  " if report.passed else "FAIL"
        print(f"{flag} {report.elapsed:7.3f}s  {report.name:34s} "
              f"worst={report.worst_residual:.3e}")
    passed = sum(r.passed for r in reports)
    print(f"\n{passed}/{len(reports)} checks passed in {total:.2f}s")
    return 0 if passed == len(reports) else 5


if __name__ == "__main__":
    raise SystemExit(main())
