"""Decorators."""

import functools
import logging

logger = logging.getLogger("uav_coverage")


def _describe_scenarios(value) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(getattr(item, "name", str(item)) for item in value)
    return getattr(value, "name", str(value))


def log_action(action_name: str = None, verbose: bool = False):
    """
    Decorator for logging use cases.

    One INFO line per call with the action name, scenario(s), method and point count;
    on failure one ERROR line with the exception type and message, then re-raise.

    Args:
        action_name: Name of action for logs (e.g., "CURVE", "VALIDATE")
        verbose: If True, append the result summary when it carries one
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            name = action_name or func.__name__.upper()

            scenario = kwargs.get("scenario", kwargs.get("scenarios", "N/A"))
            method = kwargs.get("method", "N/A")

            log_parts = [f"{name}", f"scenario='{_describe_scenarios(scenario)}'"]
            if method != "N/A":
                log_parts.append(f"method='{getattr(method, 'value', method)}'")

            try:
                result = func(*args, **kwargs)

                points = getattr(result, "points", None)
                if points is not None:
                    log_parts.append(f"points={points}")
                if verbose:
                    summary = getattr(result, "summary", None)
                    if summary:
                        log_parts.append(summary)

                log_parts.append("result=OK")
                logger.info(" ".join(log_parts))

                return result

            except Exception as e:
                log_parts.append("result=ERROR")
                log_parts.append(f"error_type={type(e).__name__}")
                log_parts.append(f"error_message='{str(e)}'")
                logger.error(" ".join(log_parts))
                raise

        return wrapper

    return decorator
