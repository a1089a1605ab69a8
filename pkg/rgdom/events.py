import json
import sys

_verbose = False


def set_verbose(flag):
    global _verbose
    _verbose = bool(flag)


def log_event(event_type, **details):
    """Logs an event as one structured JSON line on stderr."""
    if not _verbose:
        return
    event_data = {'event': event_type}
    event_data.update(details)
    print(json.dumps(event_data, default=str), file=sys.stderr, flush=True)


def log_progress(label, done, total, elapsed):
    """Single-line progress report, overwritten in place."""
    if not _verbose or total <= 0:
        return
    progress = (done / total) * 100
    print(f"\r[{label}] Progress: {progress:.1f}% | Elapsed: {elapsed:.1f}s | Completed: {done}/{total}",
          end='' if done < total else '\n', file=sys.stderr, flush=True)
