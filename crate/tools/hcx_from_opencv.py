#!/usr/bin/env python3
"""Rewrite an OpenCV "opencv-cascade-classifier" HAAR stump cascade into the
legacy "opencv-haar-classifier" layout read by cecl-core.

usage: hcx_from_opencv.py IN.xml OUT.xml
"""
import re
import sys
import xml.etree.ElementTree as ET


def main(src, dst):
    text = open(src).read()
    header = re.search(r"<!--.*?-->", text, re.S)
    root = ET.fromstring(text[text.index("<opencv_storage>"):])
    casc = root.find("cascade")
    if casc.findtext("featureType").strip() != "HAAR":
        raise SystemExit("not a HAAR cascade")
    w = int(casc.findtext("width"))
    h = int(casc.findtext("height"))
    feats = []
    for f in casc.find("features"):
        rects = [r.text.strip() for r in f.find("rects")]
        tilted = (f.findtext("tilted") or "0").strip()
        if tilted != "0":
            raise SystemExit("tilted features are not supported")
        feats.append(rects)

    name = re.sub(r"\W", "_", src.split("/")[-1].rsplit(".", 1)[0])
    out = ['<?xml version="1.0"?>']
    if header:
        out.append(header.group(0))
    out.append("<opencv_storage>")
    out.append('<%s type_id="opencv-haar-classifier">' % name)
    out.append("  <size>%d %d</size>" % (w, h))
    out.append("  <stages>")
    for si, st in enumerate(casc.find("stages")):
        out.append("    <_>")
        out.append("      <!-- stage %d -->" % si)
        out.append("      <trees>")
        for ti, wc in enumerate(st.find("weakClassifiers")):
            nodes = wc.findtext("internalNodes").split()
            leaves = wc.findtext("leafValues").split()
            if len(nodes) != 4 or len(leaves) != 2:
                raise SystemExit("stage %d tree %d is not a stump" % (si, ti))
            fidx, thr = int(nodes[2]), nodes[3]
            out.append("        <_>")
            out.append("          <!-- tree %d -->" % ti)
            out.append("          <_>")
            out.append("            <!-- root node -->")
            out.append("            <feature>")
            out.append("              <rects>")
            for r in feats[fidx]:
                out.append("                <_>%s</_>" % r)
            out.append("              </rects>")
            out.append("              <tilted>0</tilted></feature>")
            out.append("            <threshold>%s</threshold>" % thr)
            out.append("            <left_val>%s</left_val>" % leaves[0])
            out.append("            <right_val>%s</right_val></_></_>" % leaves[1])
        out.append("      </trees>")
        out.append("      <stage_threshold>%s</stage_threshold>"
                   % st.findtext("stageThreshold").strip())
        out.append("      <parent>%d</parent>" % (si - 1))
        out.append("      <next>-1</next></_>")
    out.append("  </stages>")
    out.append("</%s>" % name)
    out.append("</opencv_storage>")
    open(dst, "w").write("\n".join(out) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
