/* tslint:disable */
/* eslint-disable */

/**
 * Partial sums of Σ_{N<t≤2N} e(h m'_t), the walk in the complex plane.
 */
export function expsum_walk(c: number, theta: number, n: number, h: number): string;

/**
 * ψ, its degree-M approximation and the majorant on `points` samples of [0, 1).
 */
export function vaaler_curve(m: number, points: number): string;

/**
 * Window of x and its first `limit` terms (n, f(n), floor, prime).
 */
export function window_terms(c: number, theta: number, x: number, limit: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly expsum_walk: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly vaaler_curve: (a: number, b: number) => [number, number, number, number];
    readonly window_terms: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
