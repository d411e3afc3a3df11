// Pose-stream parsing (JSON lines; optional header without a "frame" key).

export function parsePoseStream(text: string): Map<number, number[][]> {
  const byFrame = new Map<number, number[][]>();
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    const obj = JSON.parse(trimmed) as { frame?: number; joints?: number[][] };
    if (typeof obj.frame !== "number" || !Array.isArray(obj.joints)) continue;
    byFrame.set(obj.frame, obj.joints);
  }
  return byFrame;
}
