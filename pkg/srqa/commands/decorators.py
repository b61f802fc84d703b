from functools import wraps
import click
from flask import current_app
from marshmallow import ValidationError
from srqa.constants import THREADS_CONFIG_KEY
from srqa.errors import SrqaError


def _option_name(key):
    return f"--{key.replace('_', '-')}"


def format_validation_error(messages):
    if not isinstance(messages, dict):
        return str(messages)
    parts = []
    for key, problems in messages.items():
        if isinstance(problems, (list, tuple)):
            problems = " ".join(str(problem) for problem in problems)
        parts.append(f"{_option_name(str(key))}: {problems}")
    return "; ".join(parts)


def validated_options(schema):
    """Load the command's options through ``schema`` before any work starts.

    The wrapped command receives the loaded dict. Toolkit failures become
    one-line ClickExceptions (exit code 1).
    """
    def decorator(f):
        @wraps(f)
        def decorated(**options):
            try:
                config = schema.load(options)
            except ValidationError as error:
                raise click.ClickException(format_validation_error(error.messages)) from error
            try:
                return f(config)
            except SrqaError as error:
                raise click.ClickException(str(error)) from error
        return decorated
    return decorator


def resolve_threads(requested):
    """The --threads flag when given, otherwise the app-wide SRQA_THREADS cap."""
    return requested if requested is not None else current_app.config[THREADS_CONFIG_KEY]
