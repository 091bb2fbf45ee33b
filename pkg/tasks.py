from celery.utils.log import get_task_logger

from cache import cached
from celery_app import celery
from config import Config
from oracle import GridOracleReport, merge_reports, run_grid_oracle
from properties import run_suite
from tropcore import TropicalError
from utils import parse_matrix

logger = get_task_logger(__name__)


@cached(timeout=Config.CACHE_TIMEOUT, key_prefix='oracle_')
def grid_shard(matrix_text, alphabet, start, stop, check_union=False, cap=None):
    """Partial grid-oracle report for candidates [start, stop) as a dict"""
    A = parse_matrix(matrix_text)
    report = run_grid_oracle(A, alphabet, cap=cap, start=start, stop=stop, check_union=check_union)
    return report.to_dict()


@celery.task(bind=True)
def run_grid_shard_task(self, matrix_text, alphabet, start, stop, cap=None):
    """Classify one contiguous index range of grid candidates"""
    try:
        if not self.request.is_eager:
            self.update_state(state='PROGRESS', meta={'start': start, 'stop': stop})
        report = grid_shard(matrix_text, list(alphabet), start, stop, cap=cap)
        logger.info('grid shard [%d, %d) done with %d violations', start, stop, len(report['violations']))
        return {'status': 'success', 'report': report}
    except TropicalError as e:
        logger.warning('grid shard [%d, %d) rejected: %s', start, stop, e)
        return {'status': 'error', 'start': start, 'stop': stop, 'message': str(e)}
    except Exception as e:
        logger.exception('grid shard [%d, %d) failed', start, stop)
        return {'status': 'error', 'start': start, 'stop': stop, 'message': f'{type(e).__name__}: {e}'}


def merge_grid_reports(parts):
    """Merge shard task results by sorted candidate index"""
    errors = [part for part in parts if part.get('status') != 'success']
    if errors:
        return {'status': 'error', 'message': '; '.join(part.get('message', '') for part in errors)}
    merged = merge_reports([GridOracleReport.from_dict(part['report']) for part in parts])
    return {'status': 'success', 'report': merged.to_dict()}


@celery.task(bind=True)
def run_property_shard_task(self, suite, seed, count, shard=0):
    """Run one seeded shard of a randomized property suite"""
    if not self.request.is_eager:
        self.update_state(state='PROGRESS', meta={'suite': suite, 'shard': shard})
    result = run_suite(suite, seed, count, shard)
    logger.info('suite %s shard %d: %s', suite, shard, result['status'])
    return result
