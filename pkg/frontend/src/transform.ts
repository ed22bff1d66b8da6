// World (meters, y up) -> canvas (pixels, y down) projection with
// fit-to-view scaling and centering.

export interface Viewport {
  scale: number; // pixels per meter
  px0: number; // pixel x of world minX
  py0: number; // pixel y of world minY (bottom of the world box)
}

export function fitViewport(
  min: [number, number],
  max: [number, number],
  width: number,
  height: number,
  margin = 20,
): Viewport {
  const dx = max[0] - min[0];
  const dy = max[1] - min[1];
  const scale = Math.min((width - 2 * margin) / dx, (height - 2 * margin) / dy);
  const px0 = (width - scale * dx) / 2 - scale * min[0];
  const py0 = height - (height - scale * dy) / 2 + scale * min[1];
  return { scale, px0, py0 };
}

export function worldToPixel(vp: Viewport, x: number, y: number): [number, number] {
  return [vp.px0 + vp.scale * x, vp.py0 - vp.scale * y];
}

export function metersToPixels(vp: Viewport, meters: number): number {
  return vp.scale * meters;
}
