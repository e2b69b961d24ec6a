"""Turn a cluster assignment into PBLOCK/LOC placement constraints.

Islands are vertical slice-grid bands so each one can sit on its own
bias rail; a MAC moves horizontally into its partition's band but keeps
its array row.
"""
from voltisle import (
    cluster_kmeans,
    emit_constraints,
    parse_constraints,
    plan_layout,
    synthesize_slack_table,
)


def main():
    table = synthesize_slack_table(8, 8, "row_gradient", seed=3)
    assignment = cluster_kmeans(table, 4, seed=3)
    layout = plan_layout(assignment, grid=(16, 8), mac_footprint=(1, 1))

    print(f"grid {layout.grid[0]}x{layout.grid[1]} slices, {len(layout.islands)} islands:")
    for part, (x0, y0, x1, y1) in enumerate(layout.islands):
        print(f"  partition {part}: SLICE_X{x0}Y{y0} .. SLICE_X{x1}Y{y1}")

    text = emit_constraints(layout)
    lines = text.splitlines()
    print(f"\nconstraint file: {len(lines)} lines, first 10:")
    for line in lines[:10]:
        print(f"  {line}")

    parsed = parse_constraints(text)
    print("\nre-parsing the emitted text reconstructs the layout:", parsed == layout)


if __name__ == "__main__":
    main()
