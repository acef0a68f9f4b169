"""Child-process entry point for the bundled open-source solver.

The harness talks to every solver through a subprocess so that time
limits can be enforced by killing the child. HiGHS ships as a Python
extension rather than a binary here, so this module wraps it in the
same shape: read a model, optionally read an options file, solve, and
write the ordinary HiGHS log to stdout.

Usage: python -m milpeval._highs_runner MODEL [OPTIONS_FILE]
       python -m milpeval._highs_runner --version
"""

import sys


def _new_highs():
    # A real highspy install wins; scipy's vendored copy is the fallback
    # that makes the toolkit self-contained.
    try:
        import highspy

        return highspy.Highs()
    except ImportError:
        from scipy.optimize._highspy import _core

        return _core._Highs()


def main(argv):
    if not argv or argv[0] in ("-h", "--help"):
        sys.stderr.write(__doc__)
        return 2
    if argv[0] == "--version":
        h = _new_highs()
        sys.stdout.write("HiGHS %s\n" % h.version())
        return 0

    model_path = argv[0]
    options_path = argv[1] if len(argv) > 1 else None

    h = _new_highs()
    h.setOptionValue("output_flag", True)
    h.setOptionValue("log_to_console", True)
    if options_path is not None:
        status = h.readOptions(options_path)
        if str(status).endswith("Error"):
            sys.stderr.write("cannot read options file %s\n" % options_path)
            return 3
    status = h.readModel(model_path)
    if str(status).endswith("Error"):
        sys.stderr.write("cannot read model %s\n" % model_path)
        return 4
    h.run()
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
