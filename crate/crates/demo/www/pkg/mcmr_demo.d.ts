/* tslint:disable */
/* eslint-disable */

/**
 * Simulated depumping counts at rate `gamma` (1/s) and their fit.
 */
export function depump_curve(gamma: number, shots: bigint, seed: bigint): string;

/**
 * One probe qubit benchmarked under a measurement or reset crosstalk
 * channel of strength `gamma_t`.
 */
export function rb_decay(kind: string, gamma_t: number, seed: bigint): string;

/**
 * Suppression against modulation index on `points` samples of `[0, n_max]`.
 */
export function suppression_curve(omega_over_gamma: number, n_max: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly depump_curve: (a: number, b: bigint, c: bigint) => [number, number, number, number];
    readonly rb_decay: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly suppression_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
