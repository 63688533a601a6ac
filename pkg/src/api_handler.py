# API Handler for processing replay, check and explain requests

import logging
from typing import Dict, Any, Optional

from .adjunction import reduction_report
from .calculus import Params, mk_params
from .dsl import parse_block, pretty
from .errors import InvalidParams, TraceFormatError
from .theorem_driver import preset, replay_main
from .trace_checker import check_objects
from .trace_format import trace_objects
from .utils import save_run_log, validate_explain_payload, validate_params_payload
from .windows import diagnose, explain, vanishes

logger = logging.getLogger(__name__)

PROVENANCE_ONLY = "provenance-only block"


def resolve_params(n: Optional[int] = None, d: Optional[int] = None, m: Optional[int] = None,
                   preset_name: Optional[str] = None) -> Params:
    """
    Parameters from explicit values or a preset name

    Raises:
        InvalidParams: when neither a full triple nor a preset is given, or
            the triple is not admissible
        InvalidPreset: for unknown presets
    """
    if preset_name:
        return preset(preset_name).params
    if None in (n, d, m):
        raise InvalidParams("give --n, --d and --m or a --preset", code="MissingParams")
    return mk_params(n, d, m)


def explain_pair(p: Params, p_text: str, q_text: str) -> Dict[str, Any]:
    """
    Verdict and justification for Hom(p, q) = 0

    Args:
        p: Parameters
        p_text: Source block literal
        q_text: Target block literal

    Returns:
        Dict with the verdict, a one-line text and the engine reduction

    Raises:
        DslSyntaxError: when a literal does not parse
    """
    x, y = parse_block(p_text, p), parse_block(q_text, p)
    result = {"params": p.as_dict(), "p": str(x), "q": str(y)}
    if x.is_phi or y.is_phi:
        result.update(verdict="NotGuaranteed", text=PROVENANCE_ONLY, reduction=[])
        return result

    verdict = vanishes(x, y, p)
    if verdict:
        text = f"Guaranteed: {explain(x, y, p)}"
    else:
        text = f"NotGuaranteed {diagnose(x, y, p)}"
    result.update(verdict=verdict.value, text=text, reduction=reduction_report(x, y, p))
    return result


def handle_replay(data: Dict[str, Any]) -> Dict[str, Any]:
    """
    Replay the main theorem for the requested parameters

    Args:
        data: {"n", "d", "m"} or {"preset"}

    Returns:
        Final decomposition, counts and the trace records

    Raises:
        InvalidParams: for malformed or inadmissible parameters
        ReplayFailed: when the replay aborts
    """
    errors = validate_params_payload(data)
    if errors:
        raise InvalidParams("; ".join(errors), {"errors": errors})
    p = resolve_params(data.get('n'), data.get('d'), data.get('m'), data.get('preset'))

    logger.info(f"Replay requested for {p}")
    result = replay_main(p)
    response = {
        "params": p.as_dict(),
        "final": pretty(result.final),
        "counts": {"b_type": result.counts.b_type, "a_type": result.counts.a_type},
        "phi": [{"k": b.k, "word": str(b.word), "origin": b.origin} for b in result.phi_blocks],
        "steps": len(result.trace),
        "trace": trace_objects(result.trace),
    }
    save_run_log('replay', {"params": p.as_dict(), "steps": response["steps"], "counts": response["counts"]})
    return response


def handle_check(data: Dict[str, Any]) -> Dict[str, Any]:
    """
    Check a trace given as a list of JSON objects, header first

    Returns:
        {"ok", "steps", "failed_step", "reason"}

    Raises:
        TraceFormatError: when the body carries no trace or the records are malformed
    """
    if not isinstance(data, dict) or not isinstance(data.get('trace'), list):
        raise TraceFormatError("Request body needs a 'trace' list")
    if not all(isinstance(obj, dict) for obj in data['trace']):
        raise TraceFormatError("Every trace record must be a JSON object")

    result = check_objects(data['trace'])
    if result.ok:
        logger.info(f"Trace accepted ({result.steps} steps)")
    else:
        logger.warning(f"Trace rejected at step {result.failed_step}: {result.reason}")
    save_run_log('check', result.as_dict())
    return result.as_dict()


def handle_explain(data: Dict[str, Any]) -> Dict[str, Any]:
    """
    Explain a vanishing query; d defaults to 1 and m to n*d + 2

    Raises:
        InvalidParams: for malformed parameters
        DslSyntaxError: when a block literal does not parse
    """
    errors = validate_explain_payload(data)
    if errors:
        raise InvalidParams("; ".join(errors), {"errors": errors})
    n = data['n']
    d = data.get('d', 1)
    m = data.get('m', n * d + 2)
    return explain_pair(mk_params(n, d, m), data['p'], data['q'])
