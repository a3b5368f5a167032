from concurrent.futures import ThreadPoolExecutor


def shutdown_executor(executor: ThreadPoolExecutor):
    # pending replicas are dropped, running ones finish on their own
    executor.shutdown(wait=False, cancel_futures=True)
