"""Replay the two-source illustrative schedule and print the age table."""

from dtaoi.reproduce import SAMPLE_ARRIVALS, SAMPLE_TIE_BREAKS, check_sample_trace
from dtaoi.simulator import replay_trace
from dtaoi.traffic import Discipline


def main() -> None:
    traces = {d.value: replay_trace(SAMPLE_ARRIVALS, SAMPLE_TIE_BREAKS, d) for d in Discipline}
    print("k    " + "  ".join(f"{d:>5}_1 {d:>5}_2" for d in traces))
    for k in range(21):
        print(f"{k:<4} " + "  ".join(f"{t.ages[0][k]:>7} {t.ages[1][k]:>7}" for t in traces.values()))
    print()
    for d, t in traces.items():
        for n, peaks in enumerate(t.peaks, start=1):
            print(f"{d} source {n} peaks: " + ", ".join(f"{v}@k{k}" for k, v in peaks))
    print()
    for d, bad in check_sample_trace().items():
        print(f"{d}: {'matches reference' if not bad else f'{len(bad)} cells differ from reference'}")


if __name__ == "__main__":
    main()
