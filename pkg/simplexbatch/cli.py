#!/usr/bin/python
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from . import abelian_group as ag
from .constants import (CONCRETE_F_MAX_M, DEFAULT_MAX_SUBSET_SIZE,
                        DEFAULT_SEED, DEFAULT_TRIALS, LOG_LEVELS,
                        SCHEMA_VERSION)
from .helper import (GroupSpecError, InvariantError, PreconditionError,
                     load_json_arg)

logger = logging.getLogger(__name__)

USAGE = '''simplexbatch <command> [<args>]
    Available commands:
    serve-odd         Serve 2^(k-1) odd-weight requests from the simplex code.
                      --k, --requests, --verify
    serve-affine      Serve requests lying outside the hyperplane u^perp.
                      --k, --u, --requests, --verify
    serve-functional  Hadamard-shaped serving of 2^(k-1) nonzero requests.
                      --k, --requests, --node-cap
    group-service     Service for a request list in a finite abelian group.
                      --group, --requests
    full-service      Service running through the whole group (Hall).
                      --group, --requests
    check-strong      Sweep request sequences for missing special services.
                      --group, --m, --mode, --trials, --force, --multisets,
                      --no-quotient, --witnesses, --csv
    snevily           Exhaustive Snevily numbering sweep for one group.
                      --group
    oracle            Exact disjoint-subset search on a small simplex code.
                      --k, --requests, --max-size
    coeff             Coefficient of a monomial in f.
                      --m, --monomial, --mod, --r
    verify            Re-check a document emitted by a serve command.
                      --input

    Common flags: -l --log, --out, --seed, --timing
'''


@dataclass
class RunConfig:
    command: str
    group: Optional[str] = None
    k: Optional[int] = None
    requests: Optional[str] = None
    mode: str = 'exhaustive'
    trials: int = DEFAULT_TRIALS
    force: bool = False
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    timing: bool = False
    log_level: str = 'warning'
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, command, args):
        known = {name: getattr(args, name) for name in
                 ('group', 'k', 'requests', 'mode', 'trials', 'force',
                  'seed', 'out', 'timing', 'log_level')
                 if hasattr(args, name)}
        extra = {name: value for name, value in vars(args).items()
                 if name not in known}
        return cls(command, extra=extra, **known)


class CLI:
    def __init__(self, command, argv):
        # use dispatch pattern to invoke method with same name
        self.command = command
        self.argv = argv
        self.exit_code = 0
        self.document = getattr(self, command.replace('-', '_'))()

    def _parser(self, description):
        parser = argparse.ArgumentParser(
            prog='simplexbatch ' + self.command, description=description)
        parser.add_argument(
            '-l',
            '--log',
            choices=LOG_LEVELS.keys(),
            dest='log_level',
            default='warning',
            help='Set the logging level')
        parser.add_argument(
            '--out',
            dest='out',
            type=str,
            default=None,
            help='Write the JSON document to this file instead of stdout.')
        parser.add_argument(
            '--seed',
            dest='seed',
            type=int,
            default=DEFAULT_SEED,
            help='Seed for randomized sweeps.')
        parser.add_argument(
            '--timing',
            dest='timing',
            action='store_true',
            help='Include wall-clock times in the output.')
        return parser

    def _parse(self, parser):
        args = parser.parse_args(self.argv)
        logging.basicConfig(level=LOG_LEVELS[args.log_level])
        self.config = RunConfig.from_args(self.command, args)
        return args

    def _document(self, **fields):
        doc = {'schema': SCHEMA_VERSION, 'command': self.command}
        doc.update(fields)
        return doc

    @staticmethod
    def _add_k(parser):
        parser.add_argument('--k', dest='k', type=int, required=True,
                            help='Dimension of the simplex code.')

    @staticmethod
    def _add_requests(parser):
        parser.add_argument(
            '--requests',
            dest='requests',
            type=str,
            required=True,
            help='JSON list, inline, @file.json or - for stdin.')

    @staticmethod
    def _add_group(parser):
        parser.add_argument('--group', dest='group', type=str, required=True,
                            help='Group such as Z6, Z2^3 or Z2xZ4.')

    @staticmethod
    def _bit_requests(k, raw):
        if not isinstance(k, int) or k < 1:
            raise PreconditionError('k must be a positive integer')
        if not isinstance(raw, list):
            raise PreconditionError('Requests must be a JSON list')
        vectors = []
        for j, bits in enumerate(raw):
            if not isinstance(bits, list) or len(bits) != k \
                    or any(b not in (0, 1) for b in bits):
                raise PreconditionError('Request %d must be a list of %d bits'
                                        % (j, k))
            vectors.append(ag.pack_bits(bits))
        return vectors

    @staticmethod
    def _group_requests(g, raw):
        if not isinstance(raw, list):
            raise PreconditionError('Requests must be a JSON list')
        requests = []
        for j, r in enumerate(raw):
            coords = [r] if isinstance(r, int) else r
            if not isinstance(coords, list) or not all(
                    isinstance(c, int) for c in coords):
                raise PreconditionError('Request %d must be an integer or a '
                                        'list of integers' % j)
            requests.append(ag.element(g, coords))
        return requests

    def _assignment_document(self, k, requests, assignment, verify_flag):
        from .simplex import bits_from_vector, request_class, verify_assignment
        max_size = self.config.extra.get('max_size', DEFAULT_MAX_SUBSET_SIZE)
        doc = self._document(
            k=k,
            requests=[bits_from_vector(r, k) for r in requests],
            request_class=request_class(k, requests),
            assignment=None if assignment is None else assignment.to_json())
        if assignment is not None:
            report = verify_assignment(k, requests, assignment, max_size)
            if not report.valid:
                raise InvariantError('Emitted assignment fails verification:'
                                     ' %s' % report.to_json()['violations'])
            if verify_flag:
                doc['verification'] = report.to_json()
        return doc

    def serve_odd(self):
        parser = self._parser('Serve odd-weight requests from G_k.')
        self._add_k(parser)
        self._add_requests(parser)
        parser.add_argument('--verify', dest='verify', action='store_true',
                            help='Include the verification report.')
        args = self._parse(parser)
        from .simplex import serve_odd_requests
        requests = self._bit_requests(args.k, load_json_arg(args.requests))
        assignment = serve_odd_requests(args.k, requests)
        return self._assignment_document(args.k, requests, assignment,
                                         args.verify)

    def serve_affine(self):
        parser = self._parser('Serve requests outside the hyperplane u^perp.')
        self._add_k(parser)
        parser.add_argument('--u', dest='u', type=str, required=True,
                            help='Normal vector as a JSON bit list.')
        self._add_requests(parser)
        parser.add_argument('--verify', dest='verify', action='store_true',
                            help='Include the verification report.')
        args = self._parse(parser)
        from .simplex import serve_affine_requests
        u = self._bit_requests(args.k, [load_json_arg(args.u)])[0]
        requests = self._bit_requests(args.k, load_json_arg(args.requests))
        assignment = serve_affine_requests(args.k, u, requests)
        doc = self._assignment_document(args.k, requests, assignment,
                                        args.verify)
        doc['u'] = ag.unpack_bits(u, args.k)
        return doc

    def serve_functional(self):
        parser = self._parser('Serve 2^(k-1) nonzero requests with column '
                              'sets of size at most two.')
        self._add_k(parser)
        self._add_requests(parser)
        parser.add_argument('--node-cap', dest='node_cap', type=int,
                            default=None,
                            help='Give up the backtracking after this many '
                                 'nodes.')
        parser.add_argument('--verify', dest='verify', action='store_true',
                            help='Include the verification report.')
        args = self._parse(parser)
        from .search import (check_hadamard_shape, claim_is_proven,
                             serve_via_special_service)
        requests = self._bit_requests(args.k, load_json_arg(args.requests))
        assignment = serve_via_special_service(args.k, requests,
                                               node_cap=args.node_cap)
        doc = self._assignment_document(args.k, requests, assignment,
                                        args.verify)
        m = len(requests) - 1
        proven = claim_is_proven(ag.binary_group(args.k), m)
        doc['proven'] = proven
        if assignment is None:
            if proven:
                self.exit_code = 1
        else:
            doc['hadamard'] = check_hadamard_shape(assignment)
        return doc

    def group_service(self):
        parser = self._parser('Build a service in a finite abelian group.')
        self._add_group(parser)
        self._add_requests(parser)
        args = self._parse(parser)
        from .service import build_service, verify_service
        g = ag.parse_group_spec(args.group)
        requests = self._group_requests(g, load_json_arg(args.requests))
        service = build_service(g, requests)
        if not verify_service(g, service.triples, requests).valid:
            raise InvariantError('Emitted service fails verification')
        return self._document(group=str(g),
                              requests=[list(r) for r in requests],
                              service=service.to_json())

    def full_service(self):
        parser = self._parser('Build a service whose x and y values run '
                              'through the whole group.')
        self._add_group(parser)
        self._add_requests(parser)
        args = self._parse(parser)
        from .service import NoSolution, build_full_service, verify_service
        g = ag.parse_group_spec(args.group)
        requests = self._group_requests(g, load_json_arg(args.requests))
        result = build_full_service(g, requests)
        doc = self._document(group=str(g),
                             requests=[list(r) for r in requests])
        if isinstance(result, NoSolution):
            doc['service'] = None
            doc['no_solution'] = result.to_json()
            return doc
        if not verify_service(g, result.triples, requests).valid:
            raise InvariantError('Emitted service fails verification')
        doc['service'] = result.to_json()
        return doc

    def check_strong(self):
        parser = self._parser('Look for request sequences without a special '
                              'service.')
        self._add_group(parser)
        parser.add_argument('--m', dest='m', type=int, required=True,
                            help='Length of the request sequences.')
        parser.add_argument('--mode', dest='mode', default='exhaustive',
                            choices=('exhaustive', 'random'),
                            help='Sweep every sequence or a seeded sample.')
        parser.add_argument('--trials', dest='trials', type=int,
                            default=DEFAULT_TRIALS,
                            help='Number of sequences in random mode.')
        parser.add_argument('--force', dest='force', action='store_true',
                            help='Run exhaustive sweeps above the node cap.')
        parser.add_argument('--multisets', dest='multisets',
                            action='store_true',
                            help='Enumerate request multisets only.')
        parser.add_argument('--no-quotient', dest='quotient',
                            action='store_false',
                            help='Do not pin x_1 to zero.')
        parser.add_argument('--witnesses', dest='witnesses',
                            action='store_true',
                            help='Store a witness for each solved sequence.')
        parser.add_argument('--csv', dest='csv', type=str, default=None,
                            help='Also write the report as CSV.')
        args = self._parse(parser)
        from .search import check_conjecture_strong
        g = ag.parse_group_spec(args.group)
        report = check_conjecture_strong(
            g, args.m, mode=args.mode, trials=args.trials, seed=args.seed,
            quotient=args.quotient, multisets=args.multisets,
            store_witnesses=args.witnesses, force=args.force, strict=False)
        if args.csv:
            report.to_frame().to_csv(args.csv, index=False)
        if report.failures and report.proven:
            logger.error('Failures found although the claim is proven (%s)',
                         report.proven)
            self.exit_code = 1
        return self._document(**report.to_json(timing=args.timing))

    def snevily(self):
        parser = self._parser('Exhaustive Snevily numbering sweep.')
        self._add_group(parser)
        args = self._parse(parser)
        from .search import check_snevily
        g = ag.parse_group_spec(args.group)
        report = check_snevily(g)
        if report.failures and report.proven:
            self.exit_code = 1
        return self._document(**report.to_json(timing=args.timing))

    def oracle(self):
        parser = self._parser('Decide serving by exhaustive search.')
        self._add_k(parser)
        self._add_requests(parser)
        parser.add_argument('--max-size', dest='max_size', type=int,
                            default=DEFAULT_MAX_SUBSET_SIZE,
                            help='Largest column set; 0 means unbounded.')
        args = self._parse(parser)
        from .search import oracle_can_serve
        max_size = args.max_size or None
        self.config.extra['max_size'] = max_size
        requests = self._bit_requests(args.k, load_json_arg(args.requests))
        assignment = oracle_can_serve(args.k, requests, max_size)
        doc = self._assignment_document(args.k, requests, assignment, False)
        doc['max_size'] = max_size
        return doc

    def coeff(self):
        parser = self._parser('Coefficient of a monomial in f.')
        parser.add_argument('--m', dest='m', type=int, required=True,
                            help='Number of x variables.')
        parser.add_argument('--monomial', dest='monomial', type=str,
                            required=True,
                            help='Comma-separated exponents e1,...,em.')
        parser.add_argument('--mod', dest='mod', type=int, default=None,
                            help='Also reduce the coefficient modulo p.')
        parser.add_argument('--r', dest='r', type=str, default=None,
                            help='JSON list of integer r values, required '
                                 'below the top degree.')
        args = self._parse(parser)
        from . import poly
        from sympy import isprime
        if not 1 <= args.m <= CONCRETE_F_MAX_M:
            raise PreconditionError('Coefficients of f need 1 <= m <= %d'
                                    % CONCRETE_F_MAX_M)
        monomial = poly.parse_monomial(args.monomial)
        if len(monomial) != args.m:
            raise PreconditionError('Monomial has %d exponents, m is %d' %
                                    (len(monomial), args.m))
        if sum(monomial) == poly.f_degree(args.m):
            value = poly.f_leading_form(args.m).coefficient(monomial)
        elif args.r is None:
            raise PreconditionError('Below degree %d the coefficient depends '
                                    'on r; pass --r' % poly.f_degree(args.m))
        else:
            r = load_json_arg(args.r)
            if not isinstance(r, list) or not all(
                    isinstance(v, int) for v in r):
                raise PreconditionError('--r must be a JSON list of integers')
            value = poly.build_f(args.m, r).coefficient(monomial)
        doc = self._document(m=args.m, monomial=monomial, coefficient=value)
        if args.mod is not None:
            if not isprime(args.mod):
                raise PreconditionError('%d is not prime' % args.mod)
            doc['mod_p'] = value % args.mod
        return doc

    def verify(self):
        parser = self._parser('Re-check a document emitted by this tool.')
        parser.add_argument('--input', dest='input', type=str, required=True,
                            help='JSON document, @file.json or - for stdin.')
        args = self._parse(parser)
        doc = load_json_arg(args.input)
        if not isinstance(doc, dict) or 'command' not in doc:
            raise PreconditionError('Input is not a document of this tool')
        source = doc['command']
        if source in ('serve-odd', 'serve-affine', 'serve-functional',
                      'oracle'):
            from .simplex import verify_assignment
            if doc.get('assignment') is None:
                raise PreconditionError('Document carries no assignment')
            k = doc['k']
            requests = self._bit_requests(k, doc['requests'])
            max_size = doc.get('max_size', DEFAULT_MAX_SUBSET_SIZE)
            if max_size is not None and not isinstance(max_size, int):
                raise PreconditionError('max_size must be an integer')
            report = verify_assignment(k, requests, doc['assignment'],
                                       max_size)
        elif source in ('group-service', 'full-service'):
            from .service import ServiceTriple, verify_service
            if doc.get('service') is None:
                raise PreconditionError('Document carries no service')
            if not isinstance(doc.get('group'), str):
                raise PreconditionError('Document carries no group')
            g = ag.parse_group_spec(doc['group'])
            requests = self._group_requests(g, doc['requests'])
            try:
                triples = [ServiceTriple.from_json(g, t)
                           for t in doc['service']]
            except (KeyError, TypeError, ValueError) as error:
                raise PreconditionError('Malformed service: %s' % error) \
                    from error
            report = verify_service(g, triples, requests)
        else:
            raise PreconditionError('Cannot verify output of %r' % source)
        if not report.valid:
            self.exit_code = 1
        return self._document(source=source, **report.to_json())


def _emit(doc, out=None):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + '\n')
    else:
        print(text)


def _error_document(error):
    return {'schema': SCHEMA_VERSION, 'error': type(error).__name__,
            'detail': str(error)}


def run(argv: List[str]) -> int:
    parser = argparse.ArgumentParser(
        prog='simplexbatch',
        description='Batch-code services from the binary simplex code and '
                    'finite abelian groups.',
        usage=USAGE)
    parser.add_argument('command', help='Command to run.')

    try:
        # parse_args would see the subcommand flags too
        args = parser.parse_args(argv[:1])
    except SystemExit as exit_:
        return exit_.code
    if not hasattr(CLI, args.command.replace('-', '_')) \
            or args.command.startswith('_'):
        print('Incorrect usage. See help below.', file=sys.stderr)
        parser.print_help(sys.stderr)
        return 2

    # error documents go wherever --out points, even when parsing fails
    sink = argparse.ArgumentParser(add_help=False)
    sink.add_argument('--out', dest='out', default=None)
    out = None
    try:
        out = sink.parse_known_args(argv[1:])[0].out
        cli = CLI(args.command, argv[1:])
        _emit(cli.document, cli.config.out)
        return cli.exit_code
    except SystemExit as exit_:
        return exit_.code
    except (PreconditionError, GroupSpecError, KeyError, TypeError) as error:
        _emit(_error_document(error), out)
        return 2
    except (InvariantError, RuntimeError, ValueError) as error:
        logger.exception('Command %s failed', args.command)
        _emit(_error_document(error), out)
        return 1
