"""
``manage.py upb``: check, coarse-grain and compare UPBs, build the rank-seven
state, certify PPT, compute the geometric measure and reproduce the claims.

Exit codes: 0 success, 1 a check failed, 2 malformed input or usage.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional

from django.core.management.base import BaseCommand, CommandError

from ...bases import ProductBasis, check_pairwise_orthogonality, check_unextendible
from ...catalog import (
    CHAINS,
    builtin,
    chain,
    list_builtins,
    load_table,
    reproduce_counts,
)
from ...coarse import classify_upb_across_grainings, coarse_grain
from ...exceptions import OrthogonalityError, UPBError
from ...gme import monotonicity_check, seesaw_maximize
from ...loggers import get_logger
from ...serializers import (
    basis_from_dict,
    basis_to_dict,
    count_report_to_dict,
    density_from_dict,
    density_to_dict,
    dumps,
    entry_to_dict,
    gme_result_to_dict,
    graining_report_to_dict,
    monotonicity_to_dict,
    ppt_to_dict,
    report_to_dict,
    steps_to_list,
    verdict_to_dict,
)
from ...services import CLAIMS, ReproductionService
from ...states import (
    DensityMatrix,
    bipartitions,
    build_rho,
    is_ppt,
    partial_transpose_spectrum,
    ppt_spectra,
)
from ...uom import AngleAssignment, SymbolicUOM, equivalent, instantiate, verify_chain
from ...utils import format_partitions, parse_angles, parse_cut

logger = get_logger(__name__)

CHECK_FAILED = 1
BAD_INPUT = 2


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise CommandError(f"cannot read {path}: {e}", returncode=BAD_INPUT) from e


def _load_uom(source: str) -> SymbolicUOM:
    """Builtin name or a JSON file holding one UOM object."""
    if source in list_builtins():
        return builtin(source).uom
    data = _read_json(source)
    if not isinstance(data, dict) or "rows" not in data:
        raise CommandError(f"{source} holds no symbolic matrix", returncode=BAD_INPUT)
    binding = AngleAssignment.from_dict(data["angles"]) if data.get("angles") else None
    return SymbolicUOM.from_strings(data["rows"], binding)


class Command(BaseCommand):
    help = "Unextendible product bases: checks, coarse graining, rho, PPT and GME"
    requires_system_checks = []

    def add_arguments(self, parser) -> None:
        subparsers = parser.add_subparsers(dest="subcommand", required=True)

        def with_source(sub, required: bool = True) -> None:
            group = sub.add_mutually_exclusive_group(required=required)
            group.add_argument("--in", dest="infile", help="JSON file (UOM or product basis)")
            group.add_argument("--builtin", choices=list_builtins(), help="bundled UPB")
            sub.add_argument("--angles", help="alpha,beta,gamma,delta or one value; 'pi/4' accepted")

        def with_output(sub) -> None:
            sub.add_argument("--json", action="store_true", help="print JSON")
            sub.add_argument("--out", help="also write the JSON document here")

        check = subparsers.add_parser("check", help="orthogonality and unextendibility")
        with_source(check)
        check.add_argument("--tol", type=float)
        with_output(check)

        coarse = subparsers.add_parser("coarse", help="verdicts across coarse grainings")
        with_source(coarse)
        coarse.add_argument("--cut", help="a single partition such as AB|C|D")
        coarse.add_argument("--tol", type=float)
        with_output(coarse)

        equiv = subparsers.add_parser("equiv", help="equivalence of symbolic matrices")
        equiv.add_argument("--first", help="builtin name or UOM file")
        equiv.add_argument("--second", help="builtin name or UOM file")
        equiv.add_argument("--chain", choices=sorted(CHAINS), help="verify a printed chain")
        equiv.add_argument("--budget", type=int)
        with_output(equiv)

        catalog = subparsers.add_parser("catalog", help="bundled and external UPB tables")
        catalog.add_argument("--list", action="store_true", help="list bundled entries")
        catalog.add_argument("--load", help="external table (JSON array)")
        catalog.add_argument("--verify", action="store_true", help="re-check unextendibility")
        catalog.add_argument("--counts", action="store_true", help="count 2x2x4 and 4x4 UPBs")
        with_output(catalog)

        rho = subparsers.add_parser("rho", help="normalised projector onto the complement")
        rho.add_argument("--upb", default="size9-11th-renamed", help="builtin name or UOM file")
        rho.add_argument("--angles")
        rho.add_argument("--matrix", action="store_true", help="include the full matrix")
        with_output(rho)

        ppt = subparsers.add_parser("ppt", help="partial-transpose spectra")
        self._state_source(ppt)
        ppt.add_argument("--cut", help="bipartition; all seven by default")
        with_output(ppt)

        gme = subparsers.add_parser("gme", help="geometric measure by see-saw")
        self._state_source(gme)
        gme.add_argument("--cut", help="partition of the product states")
        gme.add_argument("--restarts", type=int)
        gme.add_argument("--seed", type=int)
        gme.add_argument("--tol", type=float)
        gme.add_argument("--max-iters", type=int, dest="max_iters")
        gme.add_argument(
            "--chain",
            action="append",
            help="fine-to-coarse partition chain for a monotonicity check; repeat per step",
        )
        with_output(gme)

        reproduce = subparsers.add_parser("reproduce", help="run the claim suite")
        which = reproduce.add_mutually_exclusive_group(required=True)
        which.add_argument("--all", action="store_true")
        which.add_argument("--claim", action="append", choices=list(CLAIMS))
        reproduce.add_argument("--table", help="external size-9 table (JSON array)")
        reproduce.add_argument("--save", action="store_true", help="store ClaimRecords")
        reproduce.add_argument("--timings", action="store_true", help="include runtimes")
        reproduce.add_argument("--seed", type=int)
        with_output(reproduce)

    @staticmethod
    def _state_source(sub) -> None:
        sub.add_argument("--rho", help="density JSON written by 'upb rho --matrix'")
        sub.add_argument("--upb", default="size9-11th-renamed", help="builtin name or UOM file")
        sub.add_argument("--angles")

    def handle(self, *args: Any, **options: Any) -> None:
        subcommand = options["subcommand"]
        logger.debug(f"upb {subcommand}")
        try:
            getattr(self, f"handle_{subcommand}")(options)
        except CommandError:
            raise
        except OrthogonalityError as e:
            raise CommandError(f"OrthogonalityError: {e}", returncode=CHECK_FAILED) from e
        except UPBError as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=BAD_INPUT) from e

    def _emit(self, options: Dict[str, Any], data: Dict[str, Any], summary: str) -> None:
        text = dumps(data)
        if options.get("out"):
            Path(options["out"]).write_text(text + "\n", encoding="utf-8")
        self.stdout.write(text if options.get("json") else summary)

    def _angles(self, options: Dict[str, Any]) -> Optional[AngleAssignment]:
        return parse_angles(options["angles"]) if options.get("angles") else None

    def _basis(self, options: Dict[str, Any]) -> ProductBasis:
        if options.get("builtin"):
            return instantiate(builtin(options["builtin"]).uom, self._angles(options))
        data = _read_json(options["infile"])
        if isinstance(data, dict) and "rows" in data:
            return instantiate(_load_uom(options["infile"]), self._angles(options))
        return basis_from_dict(data)

    def _state(self, options: Dict[str, Any]) -> DensityMatrix:
        if options.get("rho"):
            rho = density_from_dict(_read_json(options["rho"]))
            rho.validate()
            return rho
        uom = _load_uom(options["upb"])
        return build_rho(instantiate(uom, self._angles(options)), source=options["upb"])

    def handle_check(self, options: Dict[str, Any]) -> None:
        basis = self._basis(options)
        orthogonality = check_pairwise_orthogonality(basis, options.get("tol"))
        data: Dict[str, Any] = {
            "basis": basis_to_dict(basis),
            "orthogonal": orthogonality.orthogonal,
            "max_overlap": orthogonality.max_overlap,
        }
        if not orthogonality.orthogonal:
            self._emit(options, data, f"not orthogonal: pair {orthogonality.pair}")
            raise CommandError("members are not pairwise orthogonal", returncode=CHECK_FAILED)
        verdict = check_unextendible(basis, options.get("tol"))
        data["verdict"] = verdict_to_dict(verdict)
        label = "unextendible" if verdict.unextendible else "extendible"
        self._emit(options, data, f"{basis.layout} size {basis.size}: {label}")
        if not verdict.unextendible:
            raise CommandError("the set is extendible", returncode=CHECK_FAILED)

    def handle_coarse(self, options: Dict[str, Any]) -> None:
        basis = self._basis(options)
        if options.get("cut"):
            partition = parse_cut(options["cut"])
            merged = coarse_grain(basis, partition)
            verdict = check_unextendible(merged, options.get("tol"))
            data = verdict_to_dict(verdict)
            data["partition"] = str(partition)
            label = "unextendible" if verdict.unextendible else "extendible"
            self._emit(options, data, f"{partition}: {label}")
            return
        report = classify_upb_across_grainings(basis, options.get("tol"))
        verdicts = report.all_verdicts()
        names = format_partitions([verdict.partition for verdict in verdicts])
        lines = [
            f"{name}: {'UPB' if verdict.unextendible else 'extendible'}"
            for name, verdict in zip(names, verdicts)
        ]
        self._emit(options, graining_report_to_dict(report), "\n".join(lines))

    def handle_equiv(self, options: Dict[str, Any]) -> None:
        if options.get("chain"):
            ok = verify_chain(chain(options["chain"]))
            self._emit(options, {"chain": options["chain"], "verified": ok},
                       f"chain {options['chain']}: {'verified' if ok else 'FAILED'}")
            if not ok:
                raise CommandError("chain does not reproduce", returncode=CHECK_FAILED)
            return
        if not options.get("first") or not options.get("second"):
            raise CommandError("equiv needs --chain or both --first and --second",
                               returncode=BAD_INPUT)
        steps = equivalent(
            _load_uom(options["first"]), _load_uom(options["second"]), options.get("budget")
        )
        found = steps is not None
        data = {"equivalent": found, "steps": steps_to_list(steps) if found else None}
        summary = " ; ".join(str(s) for s in steps) if found else "no chain found"
        self._emit(options, data, summary or "identical")
        if not found:
            raise CommandError("no equivalence found within budget", returncode=CHECK_FAILED)

    def handle_catalog(self, options: Dict[str, Any]) -> None:
        data: Dict[str, Any] = {}
        lines = []
        if options.get("list") or not options.get("load"):
            data["builtins"] = [entry_to_dict(builtin(n)) for n in list_builtins()]
            lines += [f"{e['name']} (size {e['size']}): {e['description']}" for e in data["builtins"]]
        if options.get("load"):
            entries = load_table(options["load"], verify=options.get("verify", False))
            data["table"] = [entry_to_dict(e) for e in entries]
            lines.append(f"loaded {len(entries)} entries from {options['load']}")
            if options.get("counts"):
                counts = reproduce_counts(entries)
                data["counts"] = count_report_to_dict(counts)
                lines.append(f"2x2x4 UPBs: {counts.count_224}, 4x4 UPBs: {counts.count_44}")
        self._emit(options, data, "\n".join(lines))

    def handle_rho(self, options: Dict[str, Any]) -> None:
        rho = self._state(options)
        rho.validate()
        data = density_to_dict(rho, include_matrix=options.get("matrix") or bool(options.get("out")))
        self._emit(options, data, f"rank {data['rank']}, trace {data['trace']:.12f}")

    def handle_ppt(self, options: Dict[str, Any]) -> None:
        rho = self._state(options)
        cuts = [parse_cut(options["cut"])] if options.get("cut") else bipartitions(rho.layout)
        results = [is_ppt(rho, cut) for cut in cuts]
        if options.get("cut"):
            spectra = {str(cut): partial_transpose_spectrum(rho, cut).tolist() for cut in cuts}
        else:
            spectra = ppt_spectra(rho)
        data = {
            "results": [ppt_to_dict(r) for r in results],
            "spectra": spectra,
            "ppt": all(r.ppt for r in results),
        }
        lines = [f"{r.cut}: min eigenvalue {r.min_eigenvalue:.3e}" for r in results]
        self._emit(options, data, "\n".join(lines))
        if not data["ppt"]:
            raise CommandError("state is not PPT", returncode=CHECK_FAILED)

    def handle_gme(self, options: Dict[str, Any]) -> None:
        rho = self._state(options)
        seesaw_options = {
            "restarts": options.get("restarts"),
            "max_iters": options.get("max_iters"),
            "tol": options.get("tol"),
            "seed": options.get("seed"),
        }
        if options.get("chain"):
            if options.get("cut"):
                raise CommandError("use either --cut or --chain", returncode=BAD_INPUT)
            report = monotonicity_check(
                rho, [parse_cut(step) for step in options["chain"]], **seesaw_options
            )
            lines = [f"{name}: G {value:.6f}" for name, value in report.values.items()]
            lines.append("nonincreasing" if report.ok else "NOT nonincreasing")
            self._emit(options, monotonicity_to_dict(report), "\n".join(lines))
            if not report.ok:
                raise CommandError("G increases along the chain", returncode=CHECK_FAILED)
            return
        result = seesaw_maximize(
            rho, parse_cut(options["cut"]) if options.get("cut") else None, **seesaw_options
        )
        self._emit(
            options,
            gme_result_to_dict(result),
            f"{result.partition}: max overlap {result.max_overlap:.10f}, G {result.G:.6f}",
        )

    def handle_reproduce(self, options: Dict[str, Any]) -> None:
        table = load_table(options["table"]) if options.get("table") else None
        service = ReproductionService(
            table=table,
            persist=options.get("save", False),
            seed=options.get("seed"),
        )
        report = service.run(None if options.get("all") else options["claim"])
        data = report_to_dict(report)
        data.pop("run_id")
        if not options.get("timings"):
            for claim in data["claims"]:
                claim.pop("runtime")
        lines = [f"{c.claim_id}: {c.outcome}" for c in report.claims]
        self._emit(options, data, "\n".join(lines))
        if not report.passed:
            raise CommandError("some claims failed", returncode=CHECK_FAILED)
