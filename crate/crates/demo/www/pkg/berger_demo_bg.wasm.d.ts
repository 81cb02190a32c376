/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_neck_free: (a: number, b: number) => void;
export const constants: (a: number, b: number) => [number, number, number, number];
export const neck_curvature: (a: number) => number;
export const neck_expected: (a: number) => number;
export const neck_points: (a: number) => [number, number];
export const sister_neck: (a: number, b: number, c: number) => [number, number, number];
export const surface_faces: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const surface_vertices: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
