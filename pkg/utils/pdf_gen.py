import logging
import os
from datetime import datetime
from typing import Dict, List, Optional

import markdown2
from xhtml2pdf import pisa

logger = logging.getLogger(__name__)

STYLE = """
    body { font-family: Helvetica, Arial, sans-serif; line-height: 1.5; color: #333; padding: 20px; }
    h1 { color: #2c3e50; border-bottom: 3px solid #3498db; padding-bottom: 8px; }
    h2 { color: #34495e; border-bottom: 1px solid #ecf0f1; margin-top: 24px; }
    code { background-color: #f8f9fa; font-family: Courier, monospace; font-size: 0.9em; }
    table { border-collapse: collapse; width: 100%; margin: 16px 0; }
    th, td { border: 1px solid #ddd; padding: 6px; text-align: left; font-size: 0.9em; }
    th { background-color: #f8f9fa; }
    .pass { color: #1e8449; font-weight: bold; }
    .fail { color: #c0392b; font-weight: bold; }
"""


class ReportGenerator:
    """Render suite results as markdown, then HTML, then PDF"""

    def __init__(self, title: str = "Acceptance Suite"):
        self.title = title

    def suite_markdown(self, results: List[Dict], settings: Optional[Dict] = None) -> str:
        lines = [
            f"**Generated on:** {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
            "",
        ]
        if settings:
            lines.append("**Run settings:** " + ", ".join(f"`{k}={v}`" for k, v in sorted(settings.items())))
            lines.append("")

        passed = sum(1 for r in results if r.get("passed"))
        lines += [f"## Summary: {passed}/{len(results)} criteria passed", ""]
        lines += ["| id | criterion | result | seconds | detail |", "|---|---|---|---|---|"]
        for r in results:
            verdict = '<span class="pass">PASS</span>' if r.get("passed") else '<span class="fail">FAIL</span>'
            detail = r.get("error") or r.get("detail", "")
            lines.append(
                f"| {r['id']} | {r.get('title', '')} | {verdict} | {r.get('seconds', 0.0):.2f} | "
                f"{str(detail).replace('|', '/')} |"
            )
        return "\n".join(lines) + "\n"

    def markdown_to_html(self, markdown_content: str) -> str:
        body = markdown2.markdown(f"# {self.title}\n\n" + markdown_content,
                                  extras=["tables", "fenced-code-blocks", "code-friendly"])
        return (
            "<!DOCTYPE html><html><head><meta charset=\"utf-8\">"
            f"<title>{self.title}</title><style>{STYLE}</style></head>"
            f"<body>{body}</body></html>"
        )

    def generate_pdf(self, markdown_content: str, path: str) -> Optional[str]:
        """Write the PDF to path; returns the path, or None when rendering failed"""
        logger.info("📄 Generating PDF report")
        try:
            html = self.markdown_to_html(markdown_content)
            directory = os.path.dirname(os.path.abspath(path))
            os.makedirs(directory, exist_ok=True)
            with open(path, "w+b") as pdf_file:
                status = pisa.CreatePDF(html, dest=pdf_file, encoding="utf-8")
            if status.err:
                logger.error(f"❌ Error generating PDF: {status.err}")
                return None
            logger.info(f"✅ PDF generated: {path}")
            return path
        except Exception as e:
            logger.error(f"❌ Exception generating PDF: {e}")
            return None
