"""
Console script ``upb``.

Inside a Django project use ``python manage.py upb``; this entry point
configures a minimal standalone project when DJANGO_SETTINGS_MODULE is unset
and runs the same command.
"""

import os
import sys
from typing import List, Optional, TextIO

STANDALONE_DATABASE_ENV = "UPB_DATABASE"


def configure_standalone() -> bool:
    """
    Configure Django for library use. Returns False when a project already did.
    """
    import django
    from django.conf import settings

    if settings.configured or os.environ.get("DJANGO_SETTINGS_MODULE"):
        django.setup()
        return False
    settings.configure(
        INSTALLED_APPS=["django_upb"],
        DATABASES={
            "default": {
                "ENGINE": "django.db.backends.sqlite3",
                "NAME": os.environ.get(STANDALONE_DATABASE_ENV, "upb.sqlite3"),
            }
        },
        DEFAULT_AUTO_FIELD="django.db.models.BigAutoField",
        USE_TZ=True,
        LOGGING_CONFIG=None,
    )
    django.setup()
    return True


def run(
    argv: Optional[List[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """
    Run ``upb`` with ``argv`` and return the exit code.

    0 success, 1 a check failed, 2 malformed input or usage.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    standalone = configure_standalone()

    from django.core.management import call_command
    from django.core.management.base import CommandError

    from .management.commands.upb import BAD_INPUT, Command

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    command = Command(stdout=stdout, stderr=stderr)
    parser = command.create_parser("upb", "upb")
    try:
        options = parser.parse_args(argv)
    except CommandError as e:
        stderr.write(parser.format_usage())
        stderr.write(f"{e}\n")
        return BAD_INPUT
    except SystemExit as e:
        return int(e.code or 0)

    if standalone and getattr(options, "save", False):
        call_command("migrate", "django_upb", verbosity=0)

    cmd_options = vars(options)
    args = cmd_options.pop("args", ())
    try:
        command.execute(*args, **cmd_options)
    except CommandError as e:
        stderr.write(f"{e}\n")
        return e.returncode
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
