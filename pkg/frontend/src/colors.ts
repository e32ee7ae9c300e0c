/** Node coloring for the annotation overlay.
 *
 * A node's color is the linear RGB mix of the category colors weighted by
 * the node's rating fractions (approve green, neutral gray, reject red,
 * unrated light gray). Mixed subtrees therefore show a blended gradient;
 * the exact blend is an interface choice, documented here rather than
 * prescribed by the server.
 */

export type RGB = [number, number, number];

export const CATEGORY_COLORS: Record<string, RGB> = {
  approve: [46, 140, 70],
  neutral: [128, 128, 128],
  reject: [186, 54, 48],
  unrated: [209, 213, 219],
};

export const EXPLORE_FILL = "#c7d2fe";
export const HIGHLIGHT_FILL = "#4338ca";

export function blendFractions(fractions: Record<string, number>): RGB {
  const mixed: RGB = [0, 0, 0];
  let weight = 0;
  for (const [category, color] of Object.entries(CATEGORY_COLORS)) {
    const fraction = fractions[category] ?? 0;
    weight += fraction;
    for (let channel = 0; channel < 3; channel++) {
      mixed[channel] += fraction * color[channel];
    }
  }
  if (weight === 0) return CATEGORY_COLORS.unrated;
  return [mixed[0] / weight, mixed[1] / weight, mixed[2] / weight];
}

export function rgbString(rgb: RGB): string {
  const [r, g, b] = rgb.map((channel) => Math.round(channel));
  return `rgb(${r}, ${g}, ${b})`;
}

export function parseRgb(text: string): RGB | null {
  const match = /^rgb\((\d+),\s*(\d+),\s*(\d+)\)$/.exec(text);
  if (!match) return null;
  return [Number(match[1]), Number(match[2]), Number(match[3])];
}
