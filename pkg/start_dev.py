#!/usr/bin/env python3
"""
Start local Celery workers for the distributed grid oracle and property suites
"""

import signal
import subprocess
import sys
import time

import click
import redis

from config import Config


def check_redis():
    try:
        redis.Redis(host=Config.REDIS_HOST, port=Config.REDIS_PORT, db=Config.REDIS_DB,
                    password=Config.REDIS_PASSWORD).ping()
        click.echo("✅ Redis is running")
        return True
    except redis.RedisError as e:
        click.echo(f"❌ Redis is not running: {e}")
        click.echo("   docker run -d --name tropcomm-redis-dev -p 6379:6379 redis:7-alpine")
        return False


def start_worker(index, concurrency):
    try:
        process = subprocess.Popen([
            sys.executable, "-m", "celery", "-A", "celery_app.celery", "worker",
            f"--hostname=tropcomm{index}@%h", f"--concurrency={concurrency}", "--loglevel=info",
        ])
        click.echo(f"✅ Celery worker {index} started (PID: {process.pid})")
        return process
    except OSError as e:
        click.echo(f"❌ Failed to start Celery worker {index}: {e}")
        return None


def cleanup(processes):
    click.echo("\n🛑 Shutting down workers...")
    for process in processes:
        if process.poll() is None:
            process.terminate()
            try:
                process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                process.kill()
    click.echo("✅ All workers stopped")


@click.command()
@click.option('--workers', type=click.IntRange(min=1), default=1, show_default=True)
@click.option('--concurrency', type=click.IntRange(min=1), default=Config.ORACLE_SHARDS, show_default=True)
def main(workers, concurrency):
    """Run Celery workers until interrupted."""
    if not check_redis():
        sys.exit(1)
    processes = [p for p in (start_worker(k, concurrency) for k in range(workers)) if p]
    signal.signal(signal.SIGTERM, lambda signum, frame: sys.exit(0))
    try:
        while True:
            time.sleep(1)
            for process in processes:
                if process.poll() is not None:
                    click.echo(f"⚠️  Worker PID {process.pid} has stopped unexpectedly")
                    processes.remove(process)
                    break
    except KeyboardInterrupt:
        click.echo("\n🛑 Received interrupt signal")
    finally:
        cleanup(processes)


if __name__ == "__main__":
    main()
