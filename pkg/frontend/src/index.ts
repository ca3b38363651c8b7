export * from "./types.js";
export * from "./api.js";
export * from "./state.js";
export * from "./optimistic.js";
export * from "./canvas.js";
export * from "./tracks.js";
export * from "./preview.js";
export * from "./toolbar.js";
