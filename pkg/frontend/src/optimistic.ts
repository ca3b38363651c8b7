/** Optimistic mutation helper: apply locally, sync remotely, revert on failure. */

export interface OptimisticOptions<S, R> {
  /** Apply the change locally; returns a snapshot used to revert. */
  apply: () => S;
  /** Perform the remote call. */
  remote: () => Promise<R>;
  /** Undo the local change after a remote failure. */
  revert: (snapshot: S) => void;
  /** Called with the failure after the revert ran. */
  onError?: (error: unknown) => void;
}

export async function optimistic<S, R>(
  options: OptimisticOptions<S, R>,
): Promise<R | null> {
  const snapshot = options.apply();
  try {
    return await options.remote();
  } catch (error) {
    options.revert(snapshot);
    options.onError?.(error);
    return null;
  }
}
