"""Runtime calibration: walk each island down to its minimum safe voltage."""
from voltisle import (
    DelayModel,
    calibrate,
    cluster_kmeans,
    regions_for,
    static_voltage_scaling,
    synthesize_slack_table,
)


def main():
    model = DelayModel()
    table = synthesize_slack_table(16, 16, "row_gradient", seed=11)
    assignment = cluster_kmeans(table, 4, seed=11)
    regions = regions_for("28nm-commercial")
    plan = static_voltage_scaling(regions, 4)

    print("starting from the static plan:", [f"{v:.5f}" for v in plan.v])
    result = calibrate(plan, assignment, table, model)
    print(f"converged: {result.converged} after {result.epochs} epochs\n")

    print("epoch  " + "  ".join(f"p{p}: volts flag" for p in range(plan.n)))
    stride = max(1, result.epochs // 10)
    shown = sorted(set(range(0, result.epochs, stride)) | {result.epochs - 1})
    for epoch in shown:
        voltages, flags = result.trajectory[epoch]
        cells = "  ".join(
            f"{v:.5f} {'*' if flag else '.':>4}" for v, flag in zip(voltages, flags)
        )
        print(f"{epoch:5d}  {cells}")

    print("\nfinal voltages (upper oscillation level per island):")
    for part, (v, steps) in enumerate(zip(result.final_v, result.step_counts)):
        print(f"  partition {part}: {v:.5f} V  ({steps:+d} steps of {plan.v_step:.5f} V)")
    print("\nhigher-slack islands settle lower; every island keeps the")
    print("max-activity workload free of errors at its final voltage.")


if __name__ == "__main__":
    main()
