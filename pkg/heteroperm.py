#!/usr/bin/env python3
"""
Command-line front end: cycle tables, spectra, scans and the coarse-graining
table for subsystem permutations of heterogeneous tensor-product spaces.
"""
import argparse
import io
import logging
import sys

import numpy as np
import pandas as pd

from config import get_config
from entanglement import (chi1, chi2, entanglement_Et, exchange_trace_distances,
                          psi_p)
from errors import BudgetExceededError, DomainError
from partitions import (Dims, equivalence_class, partitions_json, partitions_with_k, primitive_partition,
                        representative_partitions)
from perm_engine import SubsystemPerm, coarse_grain_match, cycle_decomposition
from spectral import RootOfUnity, eigenspace, render_spectrum, spectrum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 3
EXIT_BUDGET = 4

# Known (σ₁, σ₂) pairs for the bipartite shapes of N = 24
REFERENCE_PAIRS_24 = {
    (2, 12): ("id", "(1,4,3,2)"),
    (3, 8): ("(1,2,3,4)", "(1,4,3,2)"),
    (4, 6): ("((1),(2),(3,4))", "((1,3),(2,4))"),
    (6, 4): ("((1),(2,3,4))", "((1,3),(2,4))"),
    (8, 3): ("id", "(1,2,3,4)"),
    (12, 2): ("((1),(2),(3,4))", "(1,2,3,4)"),
}


def setup_logging(debug=False, log_file=None):
    """
    Configure root logging with a stream handler and an optional log file.

    Args:
        debug (bool): Enable debug logging
        log_file (str): Path of the log file, empty to disable
    """
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.insert(0, logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers
    )
    if debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.debug("Debug logging enabled")


def grid_type(text):
    """Parse 'start:stop:steps' into an evenly spaced grid of at least two points."""
    try:
        start, stop, steps = text.split(':')
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like start:stop:steps, got '{text}'")
    if steps < 2:
        raise argparse.ArgumentTypeError(f"grid needs at least 2 points, got {steps}")
    return np.linspace(start, stop, steps)


def dims_type(text):
    """Integer entries of a shape; validation happens when the Dims is built."""
    try:
        return tuple(int(part) for part in text.replace('x', ',').split(',') if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"shape must look like 2,2,3, got '{text}'")


def perm_type(text):
    try:
        return SubsystemPerm.parse(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e))


def resolve_perm(d, sigma):
    """Default to the swap for two slots and the cyclic shift otherwise."""
    if sigma is None:
        return SubsystemPerm.swap() if d.k == 2 else SubsystemPerm.cyclic_shift(d.k)
    if sigma.k != d.k:
        raise DomainError(f"--perm has {sigma.k} entries but --dims has {d.k}")
    return sigma


def render_table(frame, fmt):
    """Render a DataFrame as csv, json or text with LF line endings."""
    if fmt == 'csv':
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format='%.12g', lineterminator='\n')
        return buffer.getvalue()
    if fmt == 'json':
        return frame.to_json(orient='records', double_precision=12) + '\n'
    return frame.to_string(index=False) + '\n'


def cmd_cycles(d, sigma, fmt='text'):
    decomp = cycle_decomposition(d, sigma)
    if fmt == 'json':
        return decomp.to_json() + '\n'
    return decomp.render() + '\n'


def cmd_spectrum(d, sigma, fmt='text'):
    table = list(spectrum(d, sigma).items())
    if fmt == 'text':
        return render_spectrum(table)
    frame = pd.DataFrame([{"eigenvalue": eta.label(), "order": eta.order, "exponent": eta.exponent,
                           "dimension": dim} for eta, dim in table])
    return render_table(frame, fmt)


def cmd_eigenspace(d, sigma, order, exponent):
    return eigenspace(d, sigma, RootOfUnity(order, exponent)).to_json() + '\n'


def partitions_frame(N):
    """One row per equivalence class of ℙ(N): representative, k and the members."""
    rows = []
    for rep in representative_partitions(N):
        members = equivalence_class(rep).members
        rows.append({"representative": str(rep), "k": rep.k, "size": len(members),
                     "members": ' '.join(str(m) for m in members)})
    return pd.DataFrame(rows, columns=["representative", "k", "size", "members"])


def cmd_partitions(N, fmt='text'):
    if fmt == 'json':
        return partitions_json(N) + '\n'
    frame = partitions_frame(N)
    if fmt == 'csv':
        return render_table(frame, fmt)
    return ''.join(f"{rep} : {members}\n" for rep, members in zip(frame["representative"], frame["members"]))


def dims_scan_frame(dmax):
    """Symmetric and antisymmetric dimensions of T̂_{[2,d]} for d = 2..dmax."""
    rows = []
    for d in range(2, dmax + 1):
        lengths = cycle_decomposition(Dims((2, d)), SubsystemPerm.swap()).cycle_lengths()
        rows.append({"d": d, "sym_dim": len(lengths), "antisym_dim": sum(1 for l in lengths if l % 2 == 0)})
    return pd.DataFrame(rows, columns=["d", "sym_dim", "antisym_dim"])


def cmd_dims_scan(dmax, fmt='csv'):
    if dmax < 2:
        raise DomainError(f"dmax must be at least 2, got {dmax}")
    return render_table(dims_scan_frame(dmax), fmt)


def trace_distance_frame(grid, reference="cycle"):
    rows = []
    for p in grid:
        d2, d3 = exchange_trace_distances(psi_p(float(p), reference))
        rows.append({"p": float(p), "d2": d2, "d3": d3})
    return pd.DataFrame(rows, columns=["p", "d2", "d3"])


def cmd_trace_distance_scan(grid, fmt='csv', reference="cycle"):
    return render_table(trace_distance_frame(grid, reference), fmt)


def chi_frame(N, family, grid, seed):
    """
    E₁ of χ₁(p) or χ₂(p) in every representative partition of N.

    The relative phase of χ₂ is drawn once per grid point from a uniform
    distribution on [0, 2π) seeded by seed.
    """
    if family not in (1, 2):
        raise DomainError(f"family must be 1 or 2, got {family}")
    shapes = representative_partitions(N)
    phases = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, size=len(grid))
    logger.info(f"Scanning chi{family} over {len(grid)} points and {len(shapes)} partitions of N = {N}")
    rows = []
    for p, phi in zip(grid, phases):
        p = float(p)
        psi = chi1(N, p) if family == 1 else chi2(N, p, phi)
        for d in shapes:
            rows.append({"p": p, "partition": d.label(), "E": entanglement_Et(psi, d, 1)})
    return pd.DataFrame(rows, columns=["p", "partition", "E"])


def cmd_chi_scan(N, family, grid, seed, fmt='csv'):
    return render_table(chi_frame(N, family, grid, seed), fmt)


def coarse_frame(N):
    """One row per bipartite shape of N with its coarse-graining pair."""
    primitive_partition(N)
    rows = []
    for d in partitions_with_k(N, 2):
        match = coarse_grain_match(d, SubsystemPerm.swap())
        if match is None:
            rows.append({"d": str(d), "sigma1": "", "refined": "", "sigma2": "", "verified": False,
                         "source": "none"})
            continue
        found = (match.sigma1.cycle_notation(), match.sigma2.cycle_notation())
        reference = REFERENCE_PAIRS_24.get(d.entries) if N == 24 else None
        rows.append({
            "d": str(d),
            "sigma1": found[0],
            "refined": str(match.refined),
            "sigma2": found[1],
            "verified": match.verified,
            "source": "ref" if found == reference else "alt"
        })
    return pd.DataFrame(rows, columns=["d", "sigma1", "refined", "sigma2", "verified", "source"])


def cmd_coarse_table(N, fmt='text'):
    return render_table(coarse_frame(N), fmt)


def parse_args(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=['text', 'json', 'csv'], help='Output format')
    common.add_argument('--out', help='Write output to this file instead of stdout')
    common.add_argument('--debug', action='store_true', help='Enable debug logging')
    common.add_argument('--log-file', default=None, help='Log file path (empty string disables it)')

    parser = argparse.ArgumentParser(
        description='Permutation symmetry of heterogeneous tensor-product decompositions of C^N')
    commands = parser.add_subparsers(dest='command', required=True)

    perm_help = 'Image list of σ: slot i maps to the i-th value, e.g. 2,3,1 is the cycle (1,2,3)'

    cycles = commands.add_parser('cycles', parents=[common], help='Cycle decomposition π(d,σ)')
    cycles.add_argument('--dims', type=dims_type, required=True, help='Shape, e.g. 2,2,3')
    cycles.add_argument('--perm', type=perm_type, help=perm_help)

    spectrum_parser = commands.add_parser('spectrum', parents=[common], help='Eigenvalues and eigenspace dimensions')
    spectrum_parser.add_argument('--dims', type=dims_type, required=True, help='Shape, e.g. 2,2,2,2')
    spectrum_parser.add_argument('--perm', type=perm_type, help=perm_help)

    space = commands.add_parser('eigenspace', parents=[common], help='Eigenspace basis as JSON')
    space.add_argument('--dims', type=dims_type, required=True, help='Shape')
    space.add_argument('--perm', type=perm_type, help=perm_help)
    space.add_argument('--order', type=int, default=1, help='Order l of the eigenvalue exp(2πi m/l)')
    space.add_argument('--exponent', type=int, default=0, help='Exponent m of the eigenvalue')

    parts = commands.add_parser('partitions', parents=[common], help='Equivalence classes of P(N)')
    parts.add_argument('--N', type=int, required=True, help='Composite dimension')

    dims_scan = commands.add_parser('dims-scan', parents=[common], help='Sym/antisym dimensions of [2,d]')
    dims_scan.add_argument('--dmax', type=int, default=29, help='Largest d')

    td_scan = commands.add_parser('trace-distance-scan', parents=[common], help='d2(p), d3(p) for ψ(p)')
    td_scan.add_argument('--grid', type=grid_type, default=grid_type('0:1:101'), help='start:stop:steps')
    td_scan.add_argument('--reference', choices=['cycle', 'vacuum'], default='cycle',
                         help='Symmetric component of ψ(p)')

    chi_scan = commands.add_parser('chi-scan', parents=[common], help='E of χ₁/χ₂ in representative partitions')
    chi_scan.add_argument('--N', type=int, default=24, help='Dimension')
    chi_scan.add_argument('--family', type=int, choices=[1, 2], default=1, help='State family')
    chi_scan.add_argument('--grid', type=grid_type, default=grid_type('0:1:97'), help='start:stop:steps')
    chi_scan.add_argument('--seed', type=int, default=get_config().DEFAULT_SEED, help='Seed for φ(p)')

    coarse = commands.add_parser('coarse-table', parents=[common], help='Coarse-graining pairs for bipartitions')
    coarse.add_argument('--N', type=int, default=24, help='Composite dimension')

    return parser.parse_args(argv)


def run(args):
    """Dispatch a parsed command and return its rendered output."""
    fmt = args.format
    if getattr(args, 'dims', None) is not None:
        args.dims = Dims(args.dims)
    if args.command == 'cycles':
        return cmd_cycles(args.dims, resolve_perm(args.dims, args.perm), fmt or 'text')
    if args.command == 'spectrum':
        return cmd_spectrum(args.dims, resolve_perm(args.dims, args.perm), fmt or 'text')
    if args.command == 'eigenspace':
        return cmd_eigenspace(args.dims, resolve_perm(args.dims, args.perm), args.order, args.exponent)
    if args.command == 'partitions':
        return cmd_partitions(args.N, fmt or 'text')
    if args.command == 'dims-scan':
        return cmd_dims_scan(args.dmax, fmt or 'csv')
    if args.command == 'trace-distance-scan':
        return cmd_trace_distance_scan(args.grid, fmt or 'csv', args.reference)
    if args.command == 'chi-scan':
        return cmd_chi_scan(args.N, args.family, args.grid, args.seed, fmt or 'csv')
    if args.command == 'coarse-table':
        return cmd_coarse_table(args.N, fmt or 'text')
    raise DomainError(f"Unknown command {args.command}")


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code

    log_file = args.log_file if args.log_file is not None else get_config().LOG_FILE
    setup_logging(args.debug, log_file)

    try:
        output = run(args)
    except DomainError as e:
        logger.error(f"Domain error: {e}")
        return EXIT_DOMAIN
    except BudgetExceededError as e:
        logger.error(f"Budget exceeded: {e}")
        return EXIT_BUDGET
    except Exception as e:
        logger.error(f"An error occurred: {e}", exc_info=True)
        return 1

    if args.out:
        with open(args.out, 'w', newline='\n') as f:
            f.write(output)
        logger.info(f"Wrote {args.command} output to {args.out}")
    else:
        sys.stdout.write(output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
