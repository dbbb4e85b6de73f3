/* tslint:disable */
/* eslint-disable */

/**
 * Analytical FER approximation over a delta grid.
 *
 * Request fields (all optional): `delta_start`, `delta_end`, `points`,
 * `n_i`, `payload_bits`, `m`, `q`, `k_o`, `pb_frames`, `min_sum`,
 * `seed`. The residual inner BER feeding the approximation is measured
 * by Monte Carlo with `pb_frames` blocks per grid point.
 */
export function analysis_curve(request: string): string;

/**
 * One segment, every candidate coset decoder, and the metric each one
 * reports; the demo page draws these as a bar chart.
 *
 * Request fields (all optional): `m`, `delta`, `seed`, `trial`,
 * `true_index` (defaults to a seeded random draw), `min_sum`.
 */
export function matched_decode_demo(request: string): string;

/**
 * Small end-to-end campaign. Request: `{"params": {...}, "trials": N}`
 * where `params` takes the same fields as the library's system
 * parameters (all optional) and `trials` is capped to keep the browser
 * responsive.
 */
export function run_simulation(request: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analysis_curve: (a: number, b: number) => [number, number, number, number];
    readonly matched_decode_demo: (a: number, b: number) => [number, number, number, number];
    readonly run_simulation: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
