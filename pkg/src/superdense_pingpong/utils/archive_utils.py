import logging
import shutil
import time
from pathlib import Path

logger = logging.getLogger(__name__)

OVERWRITE = 'overwrite'
ARCHIVE = 'archive'
FAIL = 'fail'
POLICIES = (OVERWRITE, ARCHIVE, FAIL)


def _is_excluded(path, exclude_patterns):
    return any(path.match(exc) for exc in exclude_patterns or ())


def find_existing_outputs(results_dir, file_patterns=None, exclude_patterns=None):
    """Files in results_dir matching file_patterns, minus exclusions, hidden files and archives."""
    results_dir = Path(results_dir)
    if not results_dir.exists():
        return []
    found = []
    for pattern in file_patterns or ['*']:
        for p in sorted(results_dir.glob(pattern)):
            if _is_excluded(p, exclude_patterns) or p in found:
                continue
            if p.is_file() and not p.name.startswith('.'):
                found.append(p)
            elif p.is_dir() and not p.name.startswith('archive_'):
                # Directories only count when checking everything.
                if pattern == '*' and any(p.iterdir()):
                    found.append(p)
    return found


def _archive_dir(results_dir):
    stamp = time.strftime("%Y%m%d_%H%M%S")
    candidate = results_dir / f"archive_{stamp}"
    n = 1
    while candidate.exists():
        candidate = results_dir / f"archive_{stamp}_{n}"
        n += 1
    return candidate


def check_and_archive_outputs(results_dir, config_path=None, policy=FAIL,
                              file_patterns=None, exclude_patterns=None):
    """
    Checks for existing output files and applies the if-exists policy.

    Args:
        results_dir (Path or str): Directory to check for results.
        config_path (Path or str): Config file to snapshot into the archive.
        policy (str): 'overwrite' leaves files in place, 'archive' moves them
            to a timestamped archive_<stamp>/ folder, 'fail' refuses.
        file_patterns (list): Glob patterns to check/archive (e.g. ['run_*']).
        exclude_patterns (list): Glob patterns to EXCLUDE from checking/archiving.

    Returns:
        bool: True if safe to proceed (nothing found, Overwrite or Archived),
        False if the policy is 'fail' and outputs exist.
    """
    if policy not in POLICIES:
        raise ValueError(f"if-exists policy must be one of {POLICIES}, got {policy!r}")
    results_dir = Path(results_dir)
    files_found = find_existing_outputs(results_dir, file_patterns, exclude_patterns)
    if not files_found:
        return True

    if policy == FAIL:
        logger.error(f"Found {len(files_found)} existing outputs in {results_dir} (patterns: {file_patterns})")
        return False

    if policy == OVERWRITE:
        logger.info(f"Overwriting {len(files_found)} existing outputs in {results_dir}")
        return True

    archive_dir = _archive_dir(results_dir)
    archive_dir.mkdir()
    logger.info(f"Archiving files to {archive_dir}...")

    count = 0
    for p in files_found:
        try:
            shutil.move(str(p), str(archive_dir / p.name))
            count += 1
        except OSError as e:
            logger.warning(f"Failed to move {p.name}: {e}")

    if config_path and Path(config_path).exists():
        try:
            shutil.copy2(str(config_path), str(archive_dir / "config_snapshot.yml"))
        except OSError as e:
            logger.warning(f"Failed to snapshot config: {e}")

    logger.info(f"Archived {count} items.")
    return True
