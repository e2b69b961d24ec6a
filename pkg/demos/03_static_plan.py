"""Static voltage scheduling: split the guardband into equal islands."""
from voltisle import (
    TECHNOLOGIES,
    cluster_kmeans,
    plan_report,
    regions_for,
    round_voltage,
    static_voltage_scaling,
    synthesize_slack_table,
)


def main():
    print("bundled technology presets:")
    for name in TECHNOLOGIES:
        regions = regions_for(name)
        print(
            f"  {name:<16} crash {regions.v_crash:.2f} V  min {regions.v_min:.2f} V  "
            f"nom {regions.v_nom:.2f} V  threshold {regions.v_threshold:.2f} V"
        )

    regions = regions_for("28nm-commercial")
    plan = static_voltage_scaling(regions, 4)
    print(f"\nfour islands inside [{regions.v_crash}, {regions.v_min}] V,")
    print(f"step {plan.v_step:.5f} V, each island at its interval midpoint:")
    for part, v in enumerate(plan.v):
        print(f"  partition {part}: {v:.5f} V  (deployable rail {round_voltage(v):.2f} V)")

    # full report, including the bundled published set for this preset
    table = synthesize_slack_table(16, 16, "row_gradient", seed=7)
    assignment = cluster_kmeans(table, 4, seed=7)
    print()
    print(plan_report(plan, assignment, regions))


if __name__ == "__main__":
    main()
