/* tslint:disable */
/* eslint-disable */

export class Neck {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Mean geodesic curvature of the reconstructed neck.
     */
    curvature(): number;
    expected(): number;
    /**
     * Poincaré-disk coordinates of the neck, as `u v` pairs.
     */
    points(): Float64Array;
}

/**
 * `[k_neck, T_half, Tcal, alpha0]` for the sister pair `(H, c)`.
 */
export function constants(h: number, c: number): Float64Array;

/**
 * Reconstructs the sister of `f^c` over one period and returns its neck.
 */
export function sister_neck(h: number, c: number, n: number): Neck;

/**
 * Triangles of [`surface_vertices`] as index triples.
 */
export function surface_faces(h: number, c: number, nx: number, ny: number): Uint32Array;

/**
 * Stereographic image of one period of `f^c`, as `x y z` triples.
 */
export function surface_vertices(h: number, c: number, nx: number, ny: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_neck_free: (a: number, b: number) => void;
    readonly constants: (a: number, b: number) => [number, number, number, number];
    readonly neck_curvature: (a: number) => number;
    readonly neck_expected: (a: number) => number;
    readonly neck_points: (a: number) => [number, number];
    readonly sister_neck: (a: number, b: number, c: number) => [number, number, number];
    readonly surface_faces: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly surface_vertices: (a: number, b: number, c: number, d: number) => [number, number, number, number];
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
