/* tslint:disable */
/* eslint-disable */

/**
 * Names the page can offer in its pickers: families and fixtures for
 * `construct`, ensembles for `census`.
 */
export function catalog(): string;

/**
 * Run a region census over `count` seeded draws and return the report JSON.
 *
 * `ensemble` accepts the same names as the command line, including the
 * `family:` prefix for family draws.
 */
export function census(ensemble: string, n: number, count: number, seed: bigint): string;

/**
 * Classify a block-matrix document against the six spectral properties.
 *
 * Takes a document as JSON and returns `{"region": ..., "profile": ...}`,
 * the same report `psdblocks classify --json` writes.
 */
export function classify(doc: string): string;

/**
 * Construct a block matrix and return its JSON document.
 *
 * `target` is either a family name (a seeded random member is drawn, with
 * `n` the block size) or a pinned fixture name (the exact stored matrix is
 * returned and `n` and `seed` are ignored).
 */
export function construct(target: string, n: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly catalog: () => [number, number];
    readonly census: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly classify: (a: number, b: number) => [number, number, number, number];
    readonly construct: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
