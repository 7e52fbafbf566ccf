/** Stable, arbitrary color per area id (golden-angle hue stepping). */

export function areaColor(areaId: number): string {
  const hue = (areaId * 137.508) % 360;
  return `hsl(${hue.toFixed(1)}, 62%, 74%)`;
}

/** Overlay opacity for an activity value; the value itself is never altered. */
export function activityAlpha(activity: number): string {
  const clamped = Math.max(0, Math.min(1, activity));
  return (0.15 + 0.85 * clamped).toFixed(3);
}
