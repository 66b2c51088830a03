#!/usr/bin/env python3
import argparse
import json
import logging
import sys

from bunch import Bunch

from tpmc.cardinality import solve_cc, sweep_cardinality
from tpmc.conflict import build_conflict_graph, check_claims, graph_document
from tpmc.enumeration import ENUMERATION_CAP, solve_exact
from tpmc.flow import Selection, min_cost_transport
from tpmc.instance import (
        AT_MOST, CardinalitySense, FalsificationError, TpmcError, complete_solution,
        parse_instance, parse_solution, random_instance, serialize_instance, solution_document)
from tpmc.matching import max_weight_matching_card, parse_graph
from tpmc.polytope import (
        RANDOM_OBJECTIVES, audit_matching_cardinality, audit_instance_cut)
from tpmc.rational import format_rational, rational_argument
from tpmc.replay import replay_demand_three, replay_examples, replay_matching_vertex

log = logging.getLogger('tpmctool')


# --------------------------------------------------------------------------------
# Flags

def card_argument(s):
    try: return CardinalitySense.parse(s)
    except ValueError as e: raise argparse.ArgumentTypeError(str(e))


def make_parser():
    parser = argparse.ArgumentParser(prog='tpmctool', description=\
            """Solve and audit transportation problems with market choice, exactly.""")
    parser.add_argument('--jobs', default=1, type=int)
        # Worker processes for selection enumeration.  1 keeps runs reproducible
        # down to the log order.
    parser.add_argument('--cap', default=ENUMERATION_CAP, type=int)
        # Largest market count the enumeration oracle accepts.
    parser.add_argument('--human', action='store_true')
        # Print tables instead of JSON documents.
    parser.add_argument('--verbose', '-v', action='store_true')
        # Debug logging on stderr.
    parser.add_argument('--battery-seed', default=0, type=int)
        # Seed of the random objectives in polytope audits.
    parser.add_argument('--random-objectives', default=RANDOM_OBJECTIVES, type=int)
        # Number of random objectives added to the sign patterns in audits.
    commands = parser.add_subparsers(dest='command', required=True)

    solve = commands.add_parser('solve', help='Optimal solution of an instance.')
    solve.add_argument('--instance', required=True)
    solve.add_argument('--method', choices=['exhaustive', 'lagrangian'], default='exhaustive')
        # lagrangian needs a simple instance (every demand at most 2).
    solve.add_argument('--card', type=card_argument)
        # Cardinality constraint on rejected markets: "<=k", ">=k" or "=k".
    solve.add_argument('--fixed-selection', default=None)
        # Comma-separated accepted markets; solves the transportation problem only.

    sweep = commands.add_parser('sweep', help='Optimal value for every rejection count.')
    sweep.add_argument('--instance', required=True)

    matching = commands.add_parser('matching', help='Heaviest matching with at most k edges.')
    matching.add_argument('--graph', required=True)
    matching.add_argument('--k', required=True, type=int)

    conflict = commands.add_parser('conflict-graph', help='Dump the conflict graph of two solutions.')
    conflict.add_argument('--instance', required=True)
    conflict.add_argument('--sol-a', required=True)
    conflict.add_argument('--sol-b', required=True)

    audit = commands.add_parser('audit', help='Cardinality-cut integrality audits.')
    audit.add_argument('target', choices=sorted(AUDIT_TARGETS))
    audit.add_argument('--instance')
        # For cut.
    audit.add_argument('--graph')
        # For matching.
    audit.add_argument('--k', type=int)

    commands.add_parser('replay-examples', help='Replay both fractional-vertex examples.')

    gen = commands.add_parser('gen', help='Random instance document.')
    gen.add_argument('--seed', required=True, type=int)
    gen.add_argument('--supplies', required=True, type=int)
    gen.add_argument('--markets', required=True, type=int)
    gen.add_argument('--demand-cap', default=2, type=int, choices=[1, 2, 3])
    gen.add_argument('--supply-cap', default=1, type=int)
    gen.add_argument('--density', default='1/2', type=rational_argument)
    gen.add_argument('--cost-max', default=10, type=int)
    gen.add_argument('--revenue-max', default=20, type=int)
    return parser


# --------------------------------------------------------------------------------
# Commands

def read_text(path):
    with open(path) as f:
        return f.read()


class UsageError(Exception):
    pass


def cmd_solve(args):
    inst = parse_instance(read_text(args.instance))
    if args.fixed_selection is not None:
        accepted = [j for j in args.fixed_selection.split(',') if j]
        unknown = [j for j in accepted if j not in inst.demands]
        if unknown: raise UsageError(f"Unknown markets in selection: {unknown}")
        result = min_cost_transport(inst, Selection(accepted))
        doc = {'status': result.status}
        if result.is_optimal():
            z = {j: int(j not in accepted) for j in inst.market_ids}
            doc['solution'] = solution_document(complete_solution(inst, result.flow, z), inst)
        return doc, 0
    if args.method == 'exhaustive':
        sol = solve_exact(inst, args.card, cap=args.cap, jobs=args.jobs)
        cert = None
    else:
        card = args.card or CardinalitySense(AT_MOST, len(inst.market_ids))
        sol, cert = solve_cc(inst, card, cap=args.cap, jobs=args.jobs)
    doc = {'status': 'optimal' if sol is not None else 'infeasible'}
    if sol is not None: doc['solution'] = solution_document(sol, inst)
    if cert is not None: doc['certificate'] = dict(cert)
    return doc, 0


def cmd_sweep(args):
    inst = parse_instance(read_text(args.instance))
    rows = sweep_cardinality(inst, cap=args.cap, jobs=args.jobs)
    return {'rows': [{'k': k, 'value': None if v is None else format_rational(v)}
                     for k, v in rows]}, 0


def cmd_matching(args):
    G = parse_graph(read_text(args.graph))
    result = max_weight_matching_card(G, args.k, jobs=args.jobs)
    return {'matching': [list(e) for e in result.matching],
            'weight': format_rational(result.weight),
            'certificate': dict(result.certificate)}, 0


def cmd_conflict_graph(args):
    inst = parse_instance(read_text(args.instance))
    sol_a = parse_solution(read_text(args.sol_a), inst)
    sol_b = parse_solution(read_text(args.sol_b), inst)
    G = build_conflict_graph(inst, sol_a, sol_b)
    doc = graph_document(G)
    doc['violations'] = check_claims(G)
    return doc, 1 if doc['violations'] else 0


def verdict_document(verdict):
    return {'holds': verdict.holds, 'k': verdict.k, 'checked': verdict.checked,
            'gaps': [{'objective': g.objective,
                      'lp_value': format_rational(g.lp_value),
                      'integral_value': None if g.integral_value is None
                            else format_rational(g.integral_value),
                      'point': {name: format_rational(v) for name, v in g.point.items()}}
                     for g in verdict.gaps]}


# Audit names accepted on the command line, mapped to the audit they run.
AUDIT_TARGETS = {
    'cut': 'cut', 'theorem1': 'cut',
    'matching-vertex': 'matching-vertex', 'example1': 'matching-vertex',
    'demand-three': 'demand-three', 'example2': 'demand-three',
    'matching': 'matching',
}


def cmd_audit(args):
    target = AUDIT_TARGETS[args.target]
    if target == 'matching-vertex':
        report = replay_matching_vertex()
        return {'extreme': report.extreme, 'rank': report.rank, 'dim': report.dim,
                'tight': report.tight}, 0 if report.passed else 1
    if target == 'demand-three':
        report = replay_demand_three(k=2 if args.k is None else args.k,
                battery_seed=args.battery_seed)
        return dict(report), 0 if report.passed else 1
    if args.k is None: raise UsageError(f"audit {args.target} needs --k")
    if target == 'cut':
        if not args.instance: raise UsageError(f"audit {args.target} needs --instance")
        inst = parse_instance(read_text(args.instance))
        verdict = audit_instance_cut(inst, args.k, battery_seed=args.battery_seed,
                random_objectives=args.random_objectives)
    else:
        if not args.graph: raise UsageError("audit matching needs --graph")
        verdict = audit_matching_cardinality(parse_graph(read_text(args.graph)), args.k,
                battery_seed=args.battery_seed, random_objectives=args.random_objectives)
    return verdict_document(verdict), 0 if verdict.holds else 1


def cmd_replay_examples(args):
    report = replay_examples(battery_seed=args.battery_seed)
    doc = {'matching_vertex': dict(report.matching_vertex),
           'demand_three': dict(report.demand_three),
           'result': 'PASS' if report.passed else 'FAIL'}
    return doc, 0 if report.passed else 1


def cmd_gen(args):
    inst = random_instance(args.seed, (args.supplies, args.markets),
            demand_cap=args.demand_cap, density=args.density,
            cost_range=(0, args.cost_max), revenue_range=(0, args.revenue_max),
            supply_cap=args.supply_cap)
    return inst, 0


COMMANDS = {
    'solve': cmd_solve,
    'sweep': cmd_sweep,
    'matching': cmd_matching,
    'conflict-graph': cmd_conflict_graph,
    'audit': cmd_audit,
    'replay-examples': cmd_replay_examples,
    'gen': cmd_gen,
}


# --------------------------------------------------------------------------------
# Output

def print_human(doc, out, indent=''):
    if isinstance(doc, dict):
        for key, v in doc.items():
            if isinstance(v, (dict, list)) and v:
                print(f"{indent}{key}:", file=out)
                print_human(v, out, indent + '    ')
            else:
                print(f"{indent}{key}: {v}", file=out)
    elif isinstance(doc, list):
        for item in doc:
            if isinstance(item, dict):
                print(f"{indent}- " + "  ".join(f"{k}={v}" for k, v in item.items()), file=out)
            else:
                print(f"{indent}- {item}", file=out)
    else:
        print(f"{indent}{doc}", file=out)


def run(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = make_parser()
    try: args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
            stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')

    try: doc, code = COMMANDS[args.command](args)
    except FalsificationError as e:
        print(f"FALSIFIED: {e}", file=sys.stderr)
        return 1
    except (TpmcError, UsageError, OSError) as e:
        print(f"{parser.prog} {args.command}: {e}", file=sys.stderr)
        return 2

    if args.command == 'gen' and not args.human:
        out.write(serialize_instance(doc))
        return code
    if args.command == 'gen':
        doc = Bunch(supplies=len(doc.supply_ids), markets=len(doc.market_ids), edges=len(doc.edges))
    if args.human: print_human(doc, out)
    else: out.write(json.dumps(doc, indent=2) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
